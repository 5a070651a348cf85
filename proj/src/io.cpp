#include "deflab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace deflab {

namespace {

std::string format_double(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void write_value(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        os << pad_in << Json(it.key()).dump() << ": ";
        write_value(os, it.value(), indent, depth + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of numbers, and matrix rows of [re, im] pairs, stay on one
      // line; anything deeper breaks.
      bool flat = true;
      for (const auto& el : j) {
        if (!el.is_structured()) continue;
        if (!el.is_array()) {
          flat = false;
          break;
        }
        for (const auto& inner : el)
          if (inner.is_structured()) flat = false;
        if (el.size() > 4) flat = false;
        if (!flat) break;
      }
      os << "[";
      size_t i = 0;
      for (const auto& el : j) {
        if (!flat) os << "\n" << pad_in;
        write_value(os, el, indent, depth + 1);
        if (++i < j.size()) os << (flat ? ", " : ",");
      }
      if (!flat) os << "\n" << pad;
      os << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>(), 17);
      return;
    default:
      os << j.dump();
      return;
  }
}

double read_finite(const Json& j, const char* what) {
  if (!j.is_number())
    throw ValidationError(std::string("expected a number for ") + what);
  return j.get<double>();
}

}  // namespace

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw ValidationError("matrix must be a nonempty array of rows");
  const int n = static_cast<int>(j.size());
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ValidationError("matrix rows must all have the declared dimension");
    for (int c = 0; c < n; ++c) {
      const Json& cell = row[c];
      if (!cell.is_array() || cell.size() != 2)
        throw ValidationError("matrix entries must be [re, im] pairs");
      m(i, c) = Complex(read_finite(cell[0], "matrix entry"),
                        read_finite(cell[1], "matrix entry"));
    }
  }
  return m;
}

Experiment experiment_from_json(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("experiment file must hold an object");
  if (!doc.contains("version") || doc["version"] != 1)
    throw ValidationError("unsupported experiment file version");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer())
    throw ValidationError("experiment file needs an integer \"dim\"");
  const int dim = doc["dim"].get<int>();
  if (dim < 1) throw ValidationError("experiment dimension must be positive");
  if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty())
    throw ValidationError("experiment file needs a nonempty \"states\" array");

  std::vector<DensityMatrix> states;
  for (const auto& s : doc["states"]) {
    Mat m = matrix_from_json(s);
    if (m.rows() != dim)
      throw ValidationError("state dimension does not match \"dim\"");
    states.emplace_back(std::move(m));
  }
  return Experiment(std::move(states));
}

Experiment load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ValidationError(path + ": " + err.what());
  }
  try {
    return experiment_from_json(doc);
  } catch (const ValidationError& err) {
    throw ValidationError(path + ": " + err.what());
  }
}

Json experiment_to_json(const Experiment& e) {
  Json doc;
  doc["version"] = 1;
  doc["dim"] = e.dim();
  Json states = Json::array();
  for (const auto& rho : e.densities) states.push_back(matrix_to_json(rho.mat()));
  doc["states"] = std::move(states);
  return doc;
}

LossFunction loss_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("version") || doc["version"] != 1)
    throw ValidationError("unsupported loss file version");
  if (!doc.contains("loss") || !doc["loss"].is_array() || doc["loss"].empty())
    throw ValidationError("loss file needs a nonempty \"loss\" array");
  const auto& rows = doc["loss"];
  const int ntheta = static_cast<int>(rows.size());
  const int nd = static_cast<int>(rows[0].size());
  RMat table(ntheta, nd);
  for (int t = 0; t < ntheta; ++t) {
    if (!rows[t].is_array() || static_cast<int>(rows[t].size()) != nd)
      throw ValidationError("loss rows must all have the same length");
    for (int d = 0; d < nd; ++d) table(t, d) = read_finite(rows[t][d], "loss entry");
  }
  return LossFunction(std::move(table));
}

LossFunction load_loss(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ValidationError(path + ": " + err.what());
  }
  try {
    return loss_from_json(doc);
  } catch (const ValidationError& err) {
    throw ValidationError(path + ": " + err.what());
  }
}

Json report_to_json(const DeficiencyReport& r, std::optional<double> eps,
                    bool keep_samples) {
  Json doc;
  doc["version"] = 1;
  doc["epsilon"] = r.epsilon;
  doc["witness_t"] = r.witness_t;
  if (eps) {
    doc["eps_requested"] = *eps;
    doc["pass"] = r.epsilon <= *eps + tol::deficiency;
  }
  doc["method"] = r.method;
  if (keep_samples) {
    Json samples = Json::array();
    for (const auto& s : r.samples)
      samples.push_back(Json::array({s[0], s[1], s[2]}));
    doc["samples"] = std::move(samples);
  }
  return doc;
}

Json witness_to_json(const WitnessConstruction& w) {
  Json doc;
  doc["version"] = 1;
  doc["s1"] = w.s1;
  doc["s2"] = w.s2;
  doc["p"] = Json::array({w.witness.p[0], w.witness.p[1], w.witness.p[2]});
  doc["q"] = Json::array({w.witness.q[0], w.witness.q[1], w.witness.q[2]});
  doc["intercepts"] = Json::array(
      {w.intercepts[0], w.intercepts[1], w.intercepts[2], w.intercepts[3]});
  doc["slopes"] =
      Json::array({w.slopes[0], w.slopes[1], w.slopes[2], w.slopes[3]});
  doc["crossings"] = Json::array(
      {w.crossings[0], w.crossings[1], w.crossings[2], w.crossings[3]});
  doc["domination_violation"] = w.domination_violation;
  doc["tangency_error"] =
      Json::array({w.tangency_error[0], w.tangency_error[1]});
  return doc;
}

Json separation_to_json(const SeparationReport& r, double s1, double s2) {
  Json doc;
  doc["version"] = 1;
  doc["verdict"] = r.feasible ? "FEASIBLE" : "INFEASIBLE";
  doc["abelian"] = r.abelian;
  doc["s1"] = s1;
  doc["s2"] = s2;
  doc["testing_epsilon"] = r.deficiency.epsilon;
  doc["matching_value"] = r.matching.value;
  doc["matching_floor"] = r.matching.certificate;
  doc["margin"] = r.margin;
  doc["solver_converged"] = r.matching.converged;
  doc["witness"] = witness_to_json(r.construction);
  return doc;
}

Json extension_to_json(const CpExtensionData& x, double epsilon) {
  Json doc;
  doc["version"] = 1;
  doc["epsilon"] = epsilon;
  doc["branch"] = x.branch;
  doc["dim_in"] = x.map.dim_in;
  doc["dim_out"] = x.map.dim_out;
  doc["choi"] = matrix_to_json(x.map.matrix);
  doc["completely_positive"] = is_completely_positive(x.map, tol::numeric);
  doc["cp_defect"] = x.map.cp_defect();
  doc["trace_defect"] = x.trace_defect_value;
  return doc;
}

Json reduction_to_json(const ClassicalReduction& r) {
  Json doc;
  doc["version"] = 1;
  doc["outcomes"] = r.pvm.outcomes();
  Json rows = Json::array();
  for (int t = 0; t < r.rows.rows(); ++t) {
    Json row = Json::array();
    for (int x = 0; x < r.rows.cols(); ++x) row.push_back(r.rows(t, x));
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  Json pvm = Json::array();
  for (const auto& m : r.pvm.elements()) pvm.push_back(matrix_to_json(m));
  doc["pvm"] = std::move(pvm);
  return doc;
}

void write_json(std::ostream& os, const Json& doc, int indent) {
  write_value(os, doc, indent, 0);
  os << "\n";
}

std::string json_to_string(const Json& doc, int indent) {
  std::ostringstream ss;
  write_json(ss, doc, indent);
  return ss.str();
}

std::string format_tsv(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace deflab
