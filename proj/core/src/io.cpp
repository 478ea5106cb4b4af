#include "dse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "dse/base.hpp"
#include "json.hpp"

namespace dse::io {
namespace {

namespace fs = std::filesystem;
using datagen::LabeledDataset;
using datagen::Population;
using json = nlohmann::json;
using learners::LearnerKind;
using linalg::Matrix;
using linalg::Vector;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw DataError("read failure on '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out.good()) throw DataError("write failure on '" + path + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (const char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  for (auto& s : cells) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return cells;
}

double parse_cell_double(const std::string& cell, std::size_t row,
                         const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw DataError("row " + std::to_string(row) + ", column '" + column +
                    "': not a finite number: '" + cell + "'");
  return value;
}

int parse_cell_class(const std::string& cell, std::size_t row) {
  int value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || (value != 1 && value != 2))
    throw DataError("row " + std::to_string(row) +
                    ", column 'class': expected 1 or 2, got '" + cell + "'");
  return value;
}

// ---- strict JSON config access -------------------------------------------

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

template <typename T>
T get_as(const json& node, const std::string& ctx, const char* key) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "' in " + ctx +
                      " has the wrong type");
  }
}

template <typename T>
void read_key(const json& obj, const std::string& ctx, const char* key, T& out) {
  if (const json* node = find(obj, key)) out = get_as<T>(*node, ctx, key);
}

void parse_gmlvq_block(const json& obj, const std::string& ctx,
                       learners::GmlvqConfig& cfg) {
  check_keys(obj, ctx,
             {"prototypes_per_class", "epochs", "eta_prototype", "eta_metric",
              "phi_slope", "jitter"});
  read_key(obj, ctx, "prototypes_per_class", cfg.prototypes_per_class);
  read_key(obj, ctx, "epochs", cfg.epochs);
  read_key(obj, ctx, "eta_prototype", cfg.eta_prototype);
  read_key(obj, ctx, "eta_metric", cfg.eta_metric);
  read_key(obj, ctx, "phi_slope", cfg.phi_slope);
  read_key(obj, ctx, "jitter", cfg.jitter);
}

void parse_svm_block(const json& obj, const std::string& ctx,
                     learners::SvmConfig& cfg) {
  check_keys(obj, ctx, {"epochs", "lambda", "penalty", "eta0"});
  read_key(obj, ctx, "epochs", cfg.epochs);
  read_key(obj, ctx, "lambda", cfg.lambda);
  if (const json* node = find(obj, "penalty")) {
    const auto p = get_as<std::string>(*node, ctx, "penalty");
    if (p == "l2")
      cfg.penalty = learners::SvmPenalty::L2;
    else if (p == "l1")
      cfg.penalty = learners::SvmPenalty::L1;
    else
      throw ConfigError("key 'penalty' in " + ctx + " must be 'l1' or 'l2'");
  }
  read_key(obj, ctx, "eta0", cfg.eta0);
}

LearnerKind parse_learner_kind(const json& node, const std::string& ctx) {
  const auto kind = get_as<std::string>(node, ctx, "learner");
  if (kind == "gmlvq") return LearnerKind::Gmlvq;
  if (kind == "svm") return LearnerKind::Svm;
  throw ConfigError("key 'learner' in " + ctx + " must be 'gmlvq' or 'svm'");
}

template <typename PhaseConfig>
void parse_phase_block(const json& obj, const std::string& ctx, PhaseConfig& cfg) {
  check_keys(obj, ctx, {"runs", "learner", "test_fraction", "gmlvq", "svm"});
  read_key(obj, ctx, "runs", cfg.runs);
  if (const json* node = find(obj, "learner"))
    cfg.learner.kind = parse_learner_kind(*node, ctx);
  read_key(obj, ctx, "test_fraction", cfg.test_fraction);
  if (const json* node = find(obj, "gmlvq"))
    parse_gmlvq_block(*node, ctx + ".gmlvq", cfg.learner.gmlvq);
  if (const json* node = find(obj, "svm"))
    parse_svm_block(*node, ctx + ".svm", cfg.learner.svm);
}

// ---- deterministic JSON emission ------------------------------------------

/// Minimal ordered JSON document, emitted with 17-significant-digit
/// numbers so reports are byte-stable and round-trip exactly.
struct JNode {
  enum class Kind { Object, Array, Number, UInt, String, Bool };
  Kind kind = Kind::Object;
  std::vector<std::pair<std::string, JNode>> members;
  std::vector<JNode> items;
  double number = 0.0;
  std::uint64_t uint_value = 0;
  std::string text;
  bool flag = false;

  static JNode object() { return JNode{}; }
  static JNode array() {
    JNode n;
    n.kind = Kind::Array;
    return n;
  }
  static JNode num(double v) {
    JNode n;
    n.kind = Kind::Number;
    n.number = v;
    return n;
  }
  static JNode uint(std::uint64_t v) {
    JNode n;
    n.kind = Kind::UInt;
    n.uint_value = v;
    return n;
  }
  static JNode str(std::string s) {
    JNode n;
    n.kind = Kind::String;
    n.text = std::move(s);
    return n;
  }
  static JNode boolean(bool b) {
    JNode n;
    n.kind = Kind::Bool;
    n.flag = b;
    return n;
  }

  JNode& set(const char* key, JNode value) {
    members.emplace_back(key, std::move(value));
    return *this;
  }
  void push(JNode value) { items.push_back(std::move(value)); }

  bool scalar() const {
    return kind != Kind::Object && kind != Kind::Array;
  }
};

JNode vec_node(const Vector& v) {
  JNode n = JNode::array();
  n.items.reserve(v.size());
  for (const double x : v) n.push(JNode::num(x));
  return n;
}

JNode uvec_node(const std::vector<std::uint64_t>& v) {
  JNode n = JNode::array();
  for (const auto x : v) n.push(JNode::uint(x));
  return n;
}

JNode ivec_node(const std::vector<int>& v) {
  JNode n = JNode::array();
  for (const int x : v) n.push(JNode::uint(static_cast<std::uint64_t>(x)));
  return n;
}

void escape_into(const std::string& s, std::string& out) {
  out.push_back('"');
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

void emit(const JNode& node, std::string& out, int indent) {
  const auto pad = [&](int level) { out.append(static_cast<std::size_t>(level) * 2, ' '); };
  switch (node.kind) {
    case JNode::Kind::Object: {
      if (node.members.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (std::size_t i = 0; i < node.members.size(); ++i) {
        pad(indent + 1);
        escape_into(node.members[i].first, out);
        out += ": ";
        emit(node.members[i].second, out, indent + 1);
        if (i + 1 < node.members.size()) out += ",";
        out += "\n";
      }
      pad(indent);
      out += "}";
      return;
    }
    case JNode::Kind::Array: {
      if (node.items.empty()) {
        out += "[]";
        return;
      }
      bool all_scalar = true;
      for (const auto& item : node.items)
        if (!item.scalar()) {
          all_scalar = false;
          break;
        }
      if (all_scalar) {
        out += "[";
        for (std::size_t i = 0; i < node.items.size(); ++i) {
          if (i) out += ", ";
          emit(node.items[i], out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < node.items.size(); ++i) {
        pad(indent + 1);
        emit(node.items[i], out, indent + 1);
        if (i + 1 < node.items.size()) out += ",";
        out += "\n";
      }
      pad(indent);
      out += "]";
      return;
    }
    case JNode::Kind::Number:
      out += format_double(node.number);
      return;
    case JNode::Kind::UInt:
      out += std::to_string(node.uint_value);
      return;
    case JNode::Kind::String:
      escape_into(node.text, out);
      return;
    case JNode::Kind::Bool:
      out += node.flag ? "true" : "false";
      return;
  }
}

std::string render(const JNode& root) {
  std::string out;
  emit(root, out, 0);
  out += "\n";
  return out;
}

// ---- report schema ----------------------------------------------------------

JNode gmlvq_config_node(const learners::GmlvqConfig& c) {
  JNode n = JNode::object();
  n.set("prototypes_per_class", JNode::uint(static_cast<std::uint64_t>(c.prototypes_per_class)));
  n.set("epochs", JNode::uint(static_cast<std::uint64_t>(c.epochs)));
  n.set("eta_prototype", JNode::num(c.eta_prototype));
  n.set("eta_metric", JNode::num(c.eta_metric));
  n.set("phi_slope", JNode::num(c.phi_slope));
  n.set("jitter", JNode::num(c.jitter));
  return n;
}

JNode svm_config_node(const learners::SvmConfig& c) {
  JNode n = JNode::object();
  n.set("epochs", JNode::uint(static_cast<std::uint64_t>(c.epochs)));
  n.set("lambda", JNode::num(c.lambda));
  n.set("penalty", JNode::str(c.penalty == learners::SvmPenalty::L2 ? "l2" : "l1"));
  n.set("eta0", JNode::num(c.eta0));
  return n;
}

template <typename PhaseConfig>
JNode phase_node(const PhaseConfig& c) {
  JNode n = JNode::object();
  n.set("runs", JNode::uint(static_cast<std::uint64_t>(c.runs)));
  n.set("learner",
        JNode::str(c.learner.kind == LearnerKind::Gmlvq ? "gmlvq" : "svm"));
  n.set("test_fraction", JNode::num(c.test_fraction));
  n.set("gmlvq", gmlvq_config_node(c.learner.gmlvq));
  n.set("svm", svm_config_node(c.learner.svm));
  return n;
}

JNode config_node(const pipeline::ExperimentSpec& spec) {
  JNode n = JNode::object();
  n.set("mode", JNode::str(spec.mode == pipeline::ExperimentSpec::Mode::Synthetic
                               ? "synthetic"
                               : "csv"));
  n.set("seed", JNode::uint(spec.base_seed));
  n.set("threads", JNode::uint(static_cast<std::uint64_t>(spec.threads)));
  JNode synth = JNode::object();
  synth.set("d", JNode::uint(spec.d));
  synth.set("t", JNode::num(spec.t));
  synth.set("nu", JNode::num(spec.nu));
  synth.set("n_per_class", JNode::uint(spec.n_per_class));
  synth.set("directions", JNode::str(spec.alpha_deg ? "rotated" : "benchmark"));
  if (spec.alpha_deg) synth.set("alpha_deg", JNode::num(*spec.alpha_deg));
  n.set("synthetic", std::move(synth));
  if (spec.mode == pipeline::ExperimentSpec::Mode::Csv) {
    JNode csv = JNode::object();
    csv.set("path", JNode::str(spec.csv_path));
    n.set("csv", std::move(csv));
  }
  n.set("phase1", phase_node(spec.phase1));
  n.set("phase2", phase_node(spec.phase2));
  return n;
}

JNode curve_node(const metrics::RocCurve& c) {
  JNode n = JNode::object();
  n.set("thresholds", vec_node(c.thresholds));
  n.set("fpr", vec_node(c.fpr));
  n.set("tpr", vec_node(c.tpr));
  n.set("auc", JNode::num(c.auc));
  return n;
}

JNode ensemble_node(const pipeline::RelevanceEnsemble& e) {
  JNode n = JNode::object();
  n.set("case_id", JNode::uint(static_cast<std::uint64_t>(e.case_id)));
  n.set("seeds", uvec_node(e.seeds));
  n.set("aucs", vec_node(e.aucs));
  JNode rel = JNode::array();
  for (const auto& r : e.relevances) rel.push(vec_node(r.weights()));
  n.set("relevances", std::move(rel));
  JNode curves = JNode::array();
  for (const auto& c : e.curves) curves.push(curve_node(c));
  n.set("curves", std::move(curves));
  return n;
}

JNode summary_node(const pipeline::AucSummary& s) {
  JNode n = JNode::object();
  n.set("mean", JNode::num(s.mean));
  n.set("std", JNode::num(s.stddev));
  return n;
}

JNode embedding_node(const pipeline::EmbeddingTable& e) {
  JNode n = JNode::object();
  Vector x(e.labels.size()), y(e.labels.size());
  for (std::size_t i = 0; i < e.labels.size(); ++i) {
    x[i] = e.coords(i, 0);
    y[i] = e.coords(i, 1);
  }
  n.set("x", vec_node(x));
  n.set("y", vec_node(y));
  n.set("labels", ivec_node(e.labels));
  return n;
}

metrics::RocCurve curve_from(const json& node) {
  metrics::RocCurve c;
  c.thresholds = node.at("thresholds").get<Vector>();
  c.fpr = node.at("fpr").get<Vector>();
  c.tpr = node.at("tpr").get<Vector>();
  c.auc = node.at("auc").get<double>();
  return c;
}

pipeline::RelevanceEnsemble ensemble_from(const json& node) {
  pipeline::RelevanceEnsemble e;
  e.case_id = node.at("case_id").get<int>();
  e.seeds = node.at("seeds").get<std::vector<std::uint64_t>>();
  e.aucs = node.at("aucs").get<Vector>();
  for (const auto& row : node.at("relevances"))
    e.relevances.emplace_back(row.get<Vector>());
  for (const auto& c : node.at("curves")) e.curves.push_back(curve_from(c));
  e.validate();
  return e;
}

pipeline::AucSummary summary_from(const json& node) {
  pipeline::AucSummary s;
  s.mean = node.at("mean").get<double>();
  s.stddev = node.at("std").get<double>();
  return s;
}

pipeline::EmbeddingTable embedding_from(const json& node) {
  const auto x = node.at("x").get<Vector>();
  const auto y = node.at("y").get<Vector>();
  const auto labels = node.at("labels").get<std::vector<int>>();
  if (x.size() != y.size() || x.size() != labels.size() || x.empty())
    throw DataError("embedding table in report is inconsistent");
  pipeline::EmbeddingTable table;
  table.coords = Matrix(x.size(), 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    table.coords(i, 0) = x[i];
    table.coords(i, 1) = y[i];
  }
  table.labels = labels;
  return table;
}

// ---- CSV renderings ---------------------------------------------------------

std::string relevances_csv(const pipeline::RelevanceEnsemble& e) {
  std::string out = "run,seed,auc";
  const std::size_t d = e.dim();
  for (std::size_t j = 1; j <= d; ++j) out += ",r" + std::to_string(j);
  out += "\n";
  for (std::size_t i = 0; i < e.size(); ++i) {
    out += std::to_string(i + 1);
    out += ",";
    out += std::to_string(e.seeds[i]);
    out += ",";
    out += format_double(e.aucs[i]);
    for (std::size_t j = 0; j < d; ++j) {
      out += ",";
      out += format_double(e.relevances[i][j]);
    }
    out += "\n";
  }
  return out;
}

std::string roc_csv(const metrics::RocCurve& c) {
  std::string out = "fpr,tpr\n";
  for (std::size_t i = 0; i < c.fpr.size(); ++i)
    out += format_double(c.fpr[i]) + "," + format_double(c.tpr[i]) + "\n";
  return out;
}

std::string embedding_csv(const pipeline::EmbeddingTable& e) {
  std::string out = "x,y,class\n";
  for (std::size_t i = 0; i < e.labels.size(); ++i)
    out += format_double(e.coords(i, 0)) + "," + format_double(e.coords(i, 1)) +
           "," + std::to_string(e.labels[i]) + "\n";
  return out;
}

std::string separations_csv(const separations::SeparationRecord& r, bool has_theory) {
  std::string out =
      "epsilon_p,epsilon_o,ratio_predicted,epsilon_e,delta_e,varsigma_1,varsigma_2\n";
  if (has_theory) {
    out += format_double(r.epsilon_p) + "," + format_double(r.epsilon_o) + "," +
           format_double(r.ratio_predicted);
  } else {
    out += ",,";
  }
  out += "," + format_double(r.epsilon_e) + "," + format_double(r.delta_e) + "," +
         format_double(r.varsigma_1) + "," + format_double(r.varsigma_2) + "\n";
  return out;
}

} // namespace

DatasetBundle parse_dataset_csv(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::string line;
    std::istringstream stream(text);
    while (std::getline(stream, line))
      if (!line.empty() && line != "\r") lines.push_back(line);
  }
  if (lines.empty()) throw DataError("dataset file is empty");

  const auto header = split_csv_line(lines.front());
  std::size_t class_col = header.size();
  std::size_t population_col = header.size();
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "class") {
      if (class_col != header.size()) throw DataError("duplicate 'class' column");
      class_col = c;
    } else if (header[c] == "population") {
      if (population_col != header.size())
        throw DataError("duplicate 'population' column");
      population_col = c;
    } else {
      feature_cols.push_back(c);
      feature_names.push_back(header[c]);
    }
  }
  if (class_col == header.size()) throw DataError("missing 'class' column");
  if (feature_cols.empty()) throw DataError("no feature columns found");
  const bool has_population = population_col != header.size();

  const std::size_t n = lines.size() - 1;
  if (n == 0) throw DataError("dataset has a header but no rows");
  const std::size_t d = feature_cols.size();

  Matrix features(n, d);
  std::vector<int> labels(n);
  std::vector<Population> populations(n, Population::A);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = i + 1; // 1-based data row for error messages
    const auto cells = split_csv_line(lines[i + 1]);
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    for (std::size_t j = 0; j < d; ++j)
      features(i, j) = parse_cell_double(cells[feature_cols[j]], row, feature_names[j]);
    labels[i] = parse_cell_class(cells[class_col], row);
    if (has_population) {
      const std::string& p = cells[population_col];
      if (p == "A")
        populations[i] = Population::A;
      else if (p == "B")
        populations[i] = Population::B;
      else
        throw DataError("row " + std::to_string(row) +
                        ", column 'population': expected A or B, got '" + p + "'");
    }
  }

  DatasetBundle bundle;
  bundle.combined = LabeledDataset{features, labels, std::nullopt};
  bundle.combined.validate();
  if (!has_population) return bundle;

  auto subset = [&](Population which) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (populations[i] == which) rows.push_back(i);
    Matrix sub(std::max<std::size_t>(rows.size(), 1), d);
    std::vector<int> sub_labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double* src = features.row(rows[i]);
      std::copy(src, src + d, sub.row(i));
      sub_labels[i] = labels[rows[i]];
    }
    return std::make_pair(rows.size(), LabeledDataset{std::move(sub),
                                                      std::move(sub_labels), which});
  };
  auto [na, a] = subset(Population::A);
  auto [nb, b] = subset(Population::B);
  if (na == 0 || nb == 0)
    throw DataError("population column present but one population is empty");
  bundle.population_a = std::move(a);
  bundle.population_b = std::move(b);
  return bundle;
}

DatasetBundle read_dataset(const std::string& path) {
  try {
    return parse_dataset_csv(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_dataset_csv(const LabeledDataset& data, const std::string& path) {
  data.validate();
  std::string out;
  for (std::size_t j = 1; j <= data.dim(); ++j) {
    if (j > 1) out += ",";
    out += "f" + std::to_string(j);
  }
  out += ",class\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double* row = data.features.row(i);
    for (std::size_t j = 0; j < data.dim(); ++j) {
      out += format_double(row[j]);
      out += ",";
    }
    out += std::to_string(data.labels[i]);
    out += "\n";
  }
  write_text_file(path, out);
}

LoadedConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  check_keys(doc, "config",
             {"mode", "seed", "out", "threads", "synthetic", "csv", "phase1",
              "phase2", "sweep", "bounds"});

  LoadedConfig cfg;
  pipeline::ExperimentSpec& spec = cfg.spec;

  if (const json* node = find(doc, "mode")) {
    const auto mode = get_as<std::string>(*node, "config", "mode");
    if (mode == "synthetic")
      spec.mode = pipeline::ExperimentSpec::Mode::Synthetic;
    else if (mode == "csv")
      spec.mode = pipeline::ExperimentSpec::Mode::Csv;
    else
      throw ConfigError("key 'mode' must be 'synthetic' or 'csv'");
  }
  if (const json* node = find(doc, "seed")) {
    spec.base_seed = get_as<std::uint64_t>(*node, "config", "seed");
    cfg.has_seed = true;
  }
  if (const json* node = find(doc, "out")) {
    cfg.out_dir = get_as<std::string>(*node, "config", "out");
    cfg.has_out = true;
  }
  read_key(doc, "config", "threads", spec.threads);

  if (const json* node = find(doc, "synthetic")) {
    check_keys(*node, "synthetic",
               {"d", "t", "nu", "n_per_class", "directions", "alpha_deg"});
    read_key(*node, "synthetic", "d", spec.d);
    read_key(*node, "synthetic", "t", spec.t);
    read_key(*node, "synthetic", "nu", spec.nu);
    read_key(*node, "synthetic", "n_per_class", spec.n_per_class);
    std::string directions = "benchmark";
    read_key(*node, "synthetic", "directions", directions);
    if (directions == "rotated") {
      const json* alpha = find(*node, "alpha_deg");
      if (!alpha)
        throw ConfigError("directions 'rotated' requires key 'alpha_deg'");
      spec.alpha_deg = get_as<double>(*alpha, "synthetic", "alpha_deg");
    } else if (directions == "benchmark") {
      if (find(*node, "alpha_deg"))
        throw ConfigError("key 'alpha_deg' requires directions 'rotated'");
    } else {
      throw ConfigError("key 'directions' must be 'benchmark' or 'rotated'");
    }
  }

  if (const json* node = find(doc, "csv")) {
    check_keys(*node, "csv", {"path"});
    read_key(*node, "csv", "path", spec.csv_path);
  }
  if (spec.mode == pipeline::ExperimentSpec::Mode::Csv && spec.csv_path.empty())
    throw ConfigError("csv mode requires key 'csv.path'");

  if (const json* node = find(doc, "phase1"))
    parse_phase_block(*node, "phase1", spec.phase1);

  // Phase 2 inherits the phase-1 learner setup unless overridden.
  spec.phase2.learner = spec.phase1.learner;
  spec.phase2.runs = spec.phase1.runs;
  spec.phase2.test_fraction = spec.phase1.test_fraction;
  if (const json* node = find(doc, "phase2"))
    parse_phase_block(*node, "phase2", spec.phase2);

  if (const json* node = find(doc, "sweep")) {
    check_keys(*node, "sweep", {"t_grid"});
    read_key(*node, "sweep", "t_grid", cfg.sweep_t_grid);
  }
  if (const json* node = find(doc, "bounds")) {
    check_keys(*node, "bounds", {"d_grid", "alpha_deg_grid", "t_grid", "runs"});
    read_key(*node, "bounds", "d_grid", cfg.bounds.d_grid);
    read_key(*node, "bounds", "alpha_deg_grid", cfg.bounds.alpha_deg_grid);
    read_key(*node, "bounds", "t_grid", cfg.bounds.t_grid);
    read_key(*node, "bounds", "runs", cfg.bounds.runs);
  }

  sync_derived(cfg);
  return cfg;
}

LoadedConfig load_config_file(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_experiment_config(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_env_overrides(LoadedConfig& config) {
  if (!config.has_out) {
    if (const char* out = std::getenv("DSE_OUT"); out && *out) config.out_dir = out;
  }
  if (!config.has_seed) {
    if (const char* seed = std::getenv("DSE_SEED"); seed && *seed) {
      std::uint64_t value = 0;
      const char* end = seed + std::string_view(seed).size();
      const auto [ptr, ec] = std::from_chars(seed, end, value);
      if (ec != std::errc{} || ptr != end)
        throw ConfigError("DSE_SEED must be an unsigned integer, got '" +
                          std::string(seed) + "'");
      config.spec.base_seed = value;
    }
  }
}

void sync_derived(LoadedConfig& config) {
  config.bounds.learner = config.spec.phase1.learner;
  config.bounds.nu = config.spec.nu;
  config.bounds.n_per_class = config.spec.n_per_class;
  config.bounds.test_fraction = config.spec.phase1.test_fraction;
  config.bounds.base_seed = config.spec.base_seed;
  config.bounds.threads = config.spec.threads;
}

std::string format_double(double value) {
  if (!std::isfinite(value)) throw NumericError("non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string report_to_json(const pipeline::DseReport& report) {
  JNode root = JNode::object();
  root.set("format", JNode::str("dse-report-v1"));
  root.set("config", config_node(report.config));
  root.set("phase1_case1", ensemble_node(report.case1));
  root.set("phase1_case2", ensemble_node(report.case2));
  root.set("phase2", ensemble_node(report.phase2));

  JNode summary = JNode::object();
  summary.set("phase1_case1", summary_node(report.auc_case1));
  summary.set("phase1_case2", summary_node(report.auc_case2));
  summary.set("phase2", summary_node(report.auc_phase2));
  root.set("auc_summary", std::move(summary));

  JNode rocs = JNode::object();
  rocs.set("phase1_case1", curve_node(report.roc_case1));
  rocs.set("phase1_case2", curve_node(report.roc_case2));
  rocs.set("phase2", curve_node(report.roc_phase2));
  root.set("mean_roc", std::move(rocs));

  JNode sep = JNode::object();
  sep.set("has_theory", JNode::boolean(report.has_theory));
  if (report.has_theory) {
    sep.set("epsilon_p", JNode::num(report.separations.epsilon_p));
    sep.set("epsilon_o", JNode::num(report.separations.epsilon_o));
    sep.set("ratio_predicted", JNode::num(report.separations.ratio_predicted));
  }
  sep.set("epsilon_e", JNode::num(report.separations.epsilon_e));
  sep.set("delta_e", JNode::num(report.separations.delta_e));
  sep.set("varsigma_1", JNode::num(report.separations.varsigma_1));
  sep.set("varsigma_2", JNode::num(report.separations.varsigma_2));
  root.set("separations", std::move(sep));

  JNode embeddings = JNode::object();
  embeddings.set("phase1_case1", embedding_node(report.embedding_case1));
  embeddings.set("phase1_case2", embedding_node(report.embedding_case2));
  embeddings.set("phase2", embedding_node(report.embedding_phase2));
  root.set("embeddings", std::move(embeddings));

  return render(root);
}

pipeline::DseReport report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "dse-report-v1")
      throw DataError("unknown report format");

    pipeline::DseReport report;
    report.config = parse_experiment_config(doc.at("config").dump()).spec;
    report.case1 = ensemble_from(doc.at("phase1_case1"));
    report.case2 = ensemble_from(doc.at("phase1_case2"));
    report.phase2 = ensemble_from(doc.at("phase2"));
    const json& summary = doc.at("auc_summary");
    report.auc_case1 = summary_from(summary.at("phase1_case1"));
    report.auc_case2 = summary_from(summary.at("phase1_case2"));
    report.auc_phase2 = summary_from(summary.at("phase2"));
    const json& rocs = doc.at("mean_roc");
    report.roc_case1 = curve_from(rocs.at("phase1_case1"));
    report.roc_case2 = curve_from(rocs.at("phase1_case2"));
    report.roc_phase2 = curve_from(rocs.at("phase2"));
    const json& sep = doc.at("separations");
    report.has_theory = sep.at("has_theory").get<bool>();
    if (report.has_theory) {
      report.separations.epsilon_p = sep.at("epsilon_p").get<double>();
      report.separations.epsilon_o = sep.at("epsilon_o").get<double>();
      report.separations.ratio_predicted = sep.at("ratio_predicted").get<double>();
    }
    report.separations.epsilon_e = sep.at("epsilon_e").get<double>();
    report.separations.delta_e = sep.at("delta_e").get<double>();
    report.separations.varsigma_1 = sep.at("varsigma_1").get<double>();
    report.separations.varsigma_2 = sep.at("varsigma_2").get<double>();
    const json& emb = doc.at("embeddings");
    report.embedding_case1 = embedding_from(emb.at("phase1_case1"));
    report.embedding_case2 = embedding_from(emb.at("phase1_case2"));
    report.embedding_phase2 = embedding_from(emb.at("phase2"));
    return report;
  } catch (const json::exception& e) {
    throw DataError(std::string("report document is malformed: ") + e.what());
  }
}

std::vector<std::string> write_report(const pipeline::DseReport& report,
                                      const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());

  const std::vector<std::pair<std::string, std::string>> files = {
      {"report.json", report_to_json(report)},
      {"relevances_case1.csv", relevances_csv(report.case1)},
      {"relevances_case2.csv", relevances_csv(report.case2)},
      {"relevances_phase2.csv", relevances_csv(report.phase2)},
      {"roc_phase1_case1.csv", roc_csv(report.roc_case1)},
      {"roc_phase1_case2.csv", roc_csv(report.roc_case2)},
      {"roc_phase2.csv", roc_csv(report.roc_phase2)},
      {"embedding_phase1_case1.csv", embedding_csv(report.embedding_case1)},
      {"embedding_phase1_case2.csv", embedding_csv(report.embedding_case2)},
      {"embedding_phase2.csv", embedding_csv(report.embedding_phase2)},
      {"separations.csv",
       separations_csv(report.separations, report.has_theory)},
  };
  std::vector<std::string> names;
  names.reserve(files.size());
  for (const auto& [name, content] : files) {
    write_text_file((fs::path(dir) / name).string(), content);
    names.push_back(name);
  }
  return names;
}

void write_sweep_csv(const std::vector<sweep::AucSweepRow>& rows,
                     const std::string& path) {
  std::string out = "t,phase,case,auc_mean,auc_std\n";
  for (const auto& r : rows)
    out += format_double(r.t) + "," + std::to_string(r.phase) + "," +
           std::to_string(r.case_id) + "," + format_double(r.auc_mean) + "," +
           format_double(r.auc_std) + "\n";
  write_text_file(path, out);
}

void write_bounds_csv(const std::vector<sweep::BoundsCell>& cells,
                      const std::string& path) {
  std::string out =
      "alpha_deg,d,eps_p_mean,eps_p_std,eps_o,eps_e_mean,eps_e_std,delta_e_mean\n";
  for (const auto& c : cells)
    out += format_double(c.alpha_deg) + "," + std::to_string(c.d) + "," +
           format_double(c.eps_p_mean) + "," + format_double(c.eps_p_std) + "," +
           format_double(c.eps_o) + "," + format_double(c.eps_e_mean) + "," +
           format_double(c.eps_e_std) + "," + format_double(c.delta_e_mean) + "\n";
  write_text_file(path, out);
}

} // namespace dse::io
