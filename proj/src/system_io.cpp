#include "ffkyp/system_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ffkyp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::Index get_dim(const Json& j, const char* key) {
  require(j.contains(key), std::string("system file: missing key '") + key + "'");
  require(j.at(key).is_number_integer() && j.at(key).get<long long>() >= 0,
          std::string("system file: '") + key + "' must be a non-negative integer");
  return static_cast<Eigen::Index>(j.at(key).get<long long>());
}

Vector vector_from_json(const Json& j, Eigen::Index size, const std::string& what) {
  require(j.is_array() && static_cast<Eigen::Index>(j.size()) == size,
          "system file: '" + what + "' must be an array of length " + std::to_string(size));
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const Json& e = j.at(static_cast<std::size_t>(i));
    require(e.is_number(), "system file: '" + what + "' has a non-numeric entry");
    v(i) = e.get<double>();
  }
  return v;
}

AffineMatrixFunction affine_from_json(const Json& j, const char* k0, const char* k, Eigen::Index rows,
                                      Eigen::Index cols, Eigen::Index l) {
  require(j.contains(k0), std::string("system file: missing key '") + k0 + "'");
  Matrix c0 = matrix_from_json(j.at(k0), rows, cols, k0);
  std::vector<Matrix> coeffs;
  if (l > 0) {
    require(j.contains(k), std::string("system file: missing key '") + k + "'");
    const Json& list = j.at(k);
    require(list.is_array() && static_cast<Eigen::Index>(list.size()) == l,
            std::string("system file: '") + k + "' must list one matrix per parameter");
    for (Eigen::Index i = 0; i < l; ++i) {
      coeffs.push_back(matrix_from_json(list.at(static_cast<std::size_t>(i)), rows, cols,
                                        std::string(k) + "[" + std::to_string(i) + "]"));
    }
  } else if (j.contains(k)) {
    require(j.at(k).is_array() && j.at(k).empty(), std::string("system file: '") + k + "' must be empty when params = 0");
  }
  return AffineMatrixFunction(std::move(c0), std::move(coeffs));
}

}  // namespace

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  require(j.is_array(), "'" + what + "' must be an array");
  Matrix m(rows, cols);
  const bool nested = !j.empty() && j.at(0).is_array();
  if (nested) {
    require(static_cast<Eigen::Index>(j.size()) == rows, "'" + what + "' must have " + std::to_string(rows) + " rows");
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Json& row = j.at(static_cast<std::size_t>(r));
      require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
              "'" + what + "' rows must have " + std::to_string(cols) + " entries");
      for (Eigen::Index c = 0; c < cols; ++c) {
        const Json& e = row.at(static_cast<std::size_t>(c));
        require(e.is_number(), "'" + what + "' has a non-numeric entry");
        m(r, c) = e.get<double>();
      }
    }
  } else {
    require(static_cast<Eigen::Index>(j.size()) == rows * cols,
            "'" + what + "' must have " + std::to_string(rows * cols) + " entries");
    for (Eigen::Index i = 0; i < rows * cols; ++i) {
      const Json& e = j.at(static_cast<std::size_t>(i));
      require(e.is_number(), "'" + what + "' has a non-numeric entry");
      m(i / cols, i % cols) = e.get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

LpvSystem system_from_json(const Json& j) {
  require(j.is_object(), "system file: top level must be an object");
  static const std::set<std::string> known = {"name", "description", "n", "inputs", "outputs", "params",
                                              "A0", "A", "B0", "B", "C0", "C", "D0", "D",
                                              "p_lower", "p_upper", "rate_lower", "rate_upper"};
  for (const auto& [key, value] : j.items()) {
    require(known.count(key) == 1, "system file: unknown key '" + key + "'");
  }
  const Eigen::Index n = get_dim(j, "n");
  const Eigen::Index m = get_dim(j, "inputs");
  const Eigen::Index q = get_dim(j, "outputs");
  const Eigen::Index l = j.contains("params") ? get_dim(j, "params") : 0;
  require(n > 0 && m > 0 && q > 0, "system file: n, inputs and outputs must be positive");

  ParameterBox box;
  if (l > 0) {
    for (const char* key : {"p_lower", "p_upper", "rate_lower", "rate_upper"}) {
      require(j.contains(key), std::string("system file: missing key '") + key + "'");
    }
    box.p_lower = vector_from_json(j.at("p_lower"), l, "p_lower");
    box.p_upper = vector_from_json(j.at("p_upper"), l, "p_upper");
    box.rate_lower = vector_from_json(j.at("rate_lower"), l, "rate_lower");
    box.rate_upper = vector_from_json(j.at("rate_upper"), l, "rate_upper");
  } else {
    box = ParameterBox::empty();
  }
  return LpvSystem(affine_from_json(j, "A0", "A", n, n, l), affine_from_json(j, "B0", "B", n, m, l),
                   affine_from_json(j, "C0", "C", q, n, l), affine_from_json(j, "D0", "D", q, m, l), box);
}

Json system_to_json(const LpvSystem& s, const std::string& name) {
  Json j = Json::object();
  if (!name.empty()) j["name"] = name;
  j["n"] = s.states();
  j["inputs"] = s.inputs();
  j["outputs"] = s.outputs();
  j["params"] = s.num_params();
  auto put = [&](const char* k0, const char* k, const AffineMatrixFunction& f) {
    j[k0] = matrix_to_json(f.constant_term());
    Json list = Json::array();
    for (const Matrix& c : f.coefficients()) list.push_back(matrix_to_json(c));
    j[k] = list;
  };
  put("A0", "A", s.A());
  put("B0", "B", s.B());
  put("C0", "C", s.C());
  put("D0", "D", s.D());
  j["p_lower"] = vector_to_json(s.box().p_lower);
  j["p_upper"] = vector_to_json(s.box().p_upper);
  j["rate_lower"] = vector_to_json(s.box().rate_lower);
  j["rate_upper"] = vector_to_json(s.box().rate_upper);
  return j;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

LpvSystem load_system(const std::string& path) { return system_from_json(load_json(path)); }

void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

LpvSystem example1_system() {
  Matrix A0(2, 2), A1(2, 2), B0(2, 1), B1(2, 1), C0(1, 2), C1(1, 2), D0(1, 1), D1(1, 1);
  A0 << -8.6329, -6.5229, -1.2735, -9.4779;
  A1 << -2.5827, 7.1275, 7.8186, -1.9513;
  B0 << -19.6836, 16.7629;
  B1 << -3.7921, 8.0760;
  C0 << -1.5715, 1.5934;
  C1 << 4.2725, -4.3798;
  D0 << -4.6104;
  D1 << 1.8747;
  ParameterBox box;
  box.p_lower = Vector::Constant(1, 0.1);
  box.p_upper = Vector::Constant(1, 0.2);
  box.rate_lower = Vector::Constant(1, 0.4);
  box.rate_upper = Vector::Constant(1, 0.6);
  return LpvSystem(AffineMatrixFunction(A0, {A1}), AffineMatrixFunction(B0, {B1}), AffineMatrixFunction(C0, {C1}),
                   AffineMatrixFunction(D0, {D1}), box);
}

LpvSystem example1_consistent_system() {
  ParameterBox box = example1_system().box();
  box.rate_lower(0) = -0.2;
  box.rate_upper(0) = 0.2;
  return example1_system().with_box(box);
}

}  // namespace ffkyp
