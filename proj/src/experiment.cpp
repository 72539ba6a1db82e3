#include "caplab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "caplab/capacity.hpp"
#include "caplab/complexity.hpp"
#include "caplab/diagnostics.hpp"
#include "caplab/halting.hpp"
#include "caplab/ldm.hpp"
#include "caplab/search.hpp"
#include "caplab/seeding.hpp"
#include "caplab/vc.hpp"

namespace caplab {
namespace {

constexpr const char* kToolName = "caplab";
constexpr const char* kToolVersion = "0.1.0";

// ---- strict JSON helpers ----------------------------------------------------

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("config: " + where + ": " + what);
}

void require_object(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

/// Reject unknown keys and missing required keys.
void check_keys(const ordered_json& obj, const std::string& where,
                const std::set<std::string>& required,
                const std::set<std::string>& optional) {
  require_object(obj, where);
  for (const auto& item : obj.items()) {
    if (!required.count(item.key()) && !optional.count(item.key()))
      fail(where, "unknown key \"" + item.key() + "\"");
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail(where, "missing required key \"" + key + "\"");
  }
}

std::uint64_t as_u64(const ordered_json& obj, const std::string& key,
                     const std::string& where) {
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(where, "\"" + key + "\" must be a non-negative integer");
}

std::int64_t as_int(const ordered_json& obj, const std::string& key,
                    const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(where, "\"" + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

double as_double(const ordered_json& obj, const std::string& key,
                 const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(where, "\"" + key + "\" must be a number");
  return v.get<double>();
}

std::string as_string(const ordered_json& obj, const std::string& key,
                      const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(where, "\"" + key + "\" must be a string");
  return v.get<std::string>();
}

std::uint64_t u64_or(const ordered_json& obj, const std::string& key,
                     const std::string& where, std::uint64_t fallback) {
  return obj.contains(key) ? as_u64(obj, key, where) : fallback;
}

double double_or(const ordered_json& obj, const std::string& key,
                 const std::string& where, double fallback) {
  return obj.contains(key) ? as_double(obj, key, where) : fallback;
}

std::string string_or(const ordered_json& obj, const std::string& key,
                      const std::string& where, const std::string& fallback) {
  return obj.contains(key) ? as_string(obj, key, where) : fallback;
}

// ---- sub-object validation ---------------------------------------------------

InstanceSpace parse_space(const ordered_json& obj) {
  check_keys(obj, "space", {"n_features", "n_labels"}, {});
  InstanceSpace space;
  const std::int64_t nx = as_int(obj, "n_features", "space");
  const std::int64_t ny = as_int(obj, "n_labels", "space");
  if (nx < 1 || ny < 1) fail("space", "sizes must be >= 1");
  if (nx > 4096 || ny > 4096) fail("space", "sizes above 4096 are not supported");
  space.n_features = static_cast<int>(nx);
  space.n_labels = static_cast<int>(ny);
  return space;
}

Dataset parse_dataset(const InstanceSpace& space, const ordered_json& arr,
                      const std::string& where) {
  if (!arr.is_array() || arr.empty())
    fail(where, "a dataset must be a non-empty array of [feature, label] pairs");
  std::vector<Example> ex;
  ex.reserve(arr.size());
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2 ||
        !(pair[0].is_number_integer() || pair[0].is_number_unsigned()) ||
        !(pair[1].is_number_integer() || pair[1].is_number_unsigned()))
      fail(where, "each example must be an integer pair [feature, label]");
    const std::int64_t x = pair[0].get<std::int64_t>();
    const std::int64_t y = pair[1].get<std::int64_t>();
    if (x < 0 || x >= space.n_features || y < 0 || y >= space.n_labels)
      fail(where, "example out of range for the instance space");
    ex.push_back({static_cast<int>(x), static_cast<int>(y)});
  }
  return Dataset(space, std::move(ex));
}

void validate_dataset_dist(const ordered_json& obj, const InstanceSpace& space) {
  const std::string where = "dataset_dist";
  require_object(obj, where);
  const std::string kind = string_or(obj, "kind", where, "");
  if (kind == "iid_uniform") {
    check_keys(obj, where, {"kind", "n"}, {});
    if (as_u64(obj, "n", where) < 1) fail(where, "\"n\" must be >= 1");
  } else if (kind == "iid") {
    check_keys(obj, where, {"kind", "n", "base"}, {});
    if (as_u64(obj, "n", where) < 1) fail(where, "\"n\" must be >= 1");
    const auto& base = obj.at("base");
    if (!base.is_array() ||
        base.size() != static_cast<std::size_t>(space.n_instances()))
      fail(where, "\"base\" must be an array of |X|*|Y| probabilities");
    for (const auto& v : base)
      if (!v.is_number()) fail(where, "\"base\" entries must be numbers");
  } else if (kind == "explicit" || kind == "empirical") {
    if (kind == "explicit")
      check_keys(obj, where, {"kind", "datasets", "probs"}, {});
    else
      check_keys(obj, where, {"kind", "datasets"}, {});
    const auto& ds = obj.at("datasets");
    if (!ds.is_array() || ds.empty())
      fail(where, "\"datasets\" must be a non-empty array");
    for (const auto& d : ds) parse_dataset(space, d, where + ".datasets");
    if (kind == "explicit") {
      const auto& probs = obj.at("probs");
      if (!probs.is_array() || probs.size() != ds.size())
        fail(where, "\"probs\" must be an array matching \"datasets\"");
      for (const auto& v : probs)
        if (!v.is_number()) fail(where, "\"probs\" entries must be numbers");
    }
  } else {
    fail(where,
         "\"kind\" must be one of iid_uniform, iid, explicit, empirical");
  }
}

void validate_learner(const ordered_json& obj) {
  const std::string where = "learner";
  require_object(obj, where);
  const std::string name = string_or(obj, "name", where, "");
  const std::set<std::string> known = {"memorizer",  "anti_learner",
                                       "uniform_guesser", "finite_erm",
                                       "gibbs_erm",  "iterative_memorizer"};
  if (!known.count(name))
    fail(where, "unknown learner \"" + name + "\"");
  std::set<std::string> optional = {"loss"};
  std::set<std::string> required = {"name"};
  if (name == "gibbs_erm") required.insert("beta");
  if (name == "iterative_memorizer") required.insert("iterations");
  check_keys(obj, where, required, optional);
  if (obj.contains("loss") && as_string(obj, "loss", where) != "zero_one")
    fail(where, "\"loss\" must be \"zero_one\"");
  if (name == "gibbs_erm") {
    const double beta = as_double(obj, "beta", where);
    if (!(beta >= 0.0) || !std::isfinite(beta))
      fail(where, "\"beta\" must be a finite number >= 0");
  }
  if (name == "iterative_memorizer" && as_u64(obj, "iterations", where) < 1)
    fail(where, "\"iterations\" must be >= 1");
}

const std::set<std::string> kAnalysisNames = {
    "capacity", "sup_capacity", "time_indexed", "ldm",
    "expressivity", "bias", "bounds", "complexity",
    "vc", "diagnostics", "beta_sweep", "halting_demo"};

void validate_analyses(const ordered_json& an, const InstanceSpace& space,
                       const ordered_json& learner) {
  const std::string where = "analyses";
  require_object(an, where);
  for (const auto& item : an.items()) {
    if (!kAnalysisNames.count(item.key()))
      fail(where, "unknown analysis \"" + item.key() + "\"");
  }
  if (an.contains("capacity")) check_keys(an.at("capacity"), "analyses.capacity", {}, {});
  if (an.contains("sup_capacity")) {
    const auto& a = an.at("sup_capacity");
    check_keys(a, "analyses.sup_capacity", {},
               {"domain", "tol", "max_iter", "starts", "passes"});
    const std::string dom = string_or(a, "domain", "analyses.sup_capacity", "support");
    if (dom != "support" && dom != "iid")
      fail("analyses.sup_capacity", "\"domain\" must be \"support\" or \"iid\"");
    if (double_or(a, "tol", "analyses.sup_capacity", 1e-9) <= 0)
      fail("analyses.sup_capacity", "\"tol\" must be > 0");
  }
  if (an.contains("time_indexed")) {
    const auto& a = an.at("time_indexed");
    check_keys(a, "analyses.time_indexed", {}, {"variant"});
    const std::string v = string_or(a, "variant", "analyses.time_indexed", "fixed");
    if (v != "fixed" && v != "sup")
      fail("analyses.time_indexed", "\"variant\" must be \"fixed\" or \"sup\"");
  }
  if (an.contains("ldm")) {
    const auto& a = an.at("ldm");
    check_keys(a, "analyses.ldm", {"k"}, {"schedule", "bootstrap", "level"});
    const std::uint64_t k = as_u64(a, "k", "analyses.ldm");
    if (k < 2) fail("analyses.ldm", "\"k\" must be >= 2");
    if (a.contains("schedule")) {
      const auto& s = a.at("schedule");
      if (!s.is_array() || s.empty())
        fail("analyses.ldm", "\"schedule\" must be a non-empty array");
      std::uint64_t prev = 0;
      for (const auto& v : s) {
        if (!v.is_number_unsigned() && !v.is_number_integer())
          fail("analyses.ldm", "\"schedule\" entries must be integers");
        const std::uint64_t cur = v.get<std::uint64_t>();
        if (cur <= prev) fail("analyses.ldm", "\"schedule\" must be strictly increasing");
        prev = cur;
      }
      if (prev != k) fail("analyses.ldm", "\"schedule\" must end at \"k\"");
    }
    const double level = double_or(a, "level", "analyses.ldm", 0.95);
    if (!(level > 0.0 && level < 1.0))
      fail("analyses.ldm", "\"level\" must be in (0, 1)");
  }
  if (an.contains("expressivity"))
    check_keys(an.at("expressivity"), "analyses.expressivity", {}, {});
  if (an.contains("bias")) {
    const auto& a = an.at("bias");
    check_keys(a, "analyses.bias", {"epsilon"}, {});
    if (as_double(a, "epsilon", "analyses.bias") <= 0.0)
      fail("analyses.bias", "\"epsilon\" must be > 0");
  }
  if (an.contains("bounds")) {
    const auto& a = an.at("bounds");
    check_keys(a, "analyses.bounds", {}, {"epsilon"});
    if (a.contains("epsilon") && as_double(a, "epsilon", "analyses.bounds") <= 0.0)
      fail("analyses.bounds", "\"epsilon\" must be > 0");
  }
  if (an.contains("complexity")) {
    const auto& a = an.at("complexity");
    check_keys(a, "analyses.complexity", {}, {"mc_samples"});
    if (u64_or(a, "mc_samples", "analyses.complexity", 10000) < 2)
      fail("analyses.complexity", "\"mc_samples\" must be >= 2");
  }
  if (an.contains("vc")) {
    const auto& a = an.at("vc");
    check_keys(a, "analyses.vc", {}, {"classifiers", "variant"});
    const std::string c = string_or(a, "classifiers", "analyses.vc", "thresholds");
    if (c != "thresholds" && c != "full_tables")
      fail("analyses.vc", "\"classifiers\" must be \"thresholds\" or \"full_tables\"");
    if (c == "thresholds" && space.n_labels != 2)
      fail("analyses.vc", "threshold classifiers require n_labels = 2");
    const std::string v = string_or(a, "variant", "analyses.vc", "fixed");
    if (v != "fixed" && v != "sup")
      fail("analyses.vc", "\"variant\" must be \"fixed\" or \"sup\"");
  }
  if (an.contains("diagnostics")) {
    const auto& a = an.at("diagnostics");
    check_keys(a, "analyses.diagnostics", {},
               {"epsilon", "slack", "mc_samples", "train", "underfit_variant"});
    if (double_or(a, "slack", "analyses.diagnostics", 0.0) < 0.0)
      fail("analyses.diagnostics", "\"slack\" must be >= 0");
    if (a.contains("train"))
      parse_dataset(space, a.at("train"), "analyses.diagnostics.train");
    const std::string v =
        string_or(a, "underfit_variant", "analyses.diagnostics", "fixed");
    if (v != "fixed" && v != "sup")
      fail("analyses.diagnostics", "\"underfit_variant\" must be \"fixed\" or \"sup\"");
  }
  if (an.contains("beta_sweep")) {
    const auto& a = an.at("beta_sweep");
    check_keys(a, "analyses.beta_sweep", {"betas"}, {"epsilon"});
    const auto& betas = a.at("betas");
    if (!betas.is_array() || betas.empty())
      fail("analyses.beta_sweep", "\"betas\" must be a non-empty array");
    for (const auto& b : betas) {
      if (!b.is_number() || !(b.get<double>() >= 0.0) ||
          !std::isfinite(b.get<double>()))
        fail("analyses.beta_sweep", "betas must be finite numbers >= 0");
    }
    if (string_or(learner, "name", "learner", "") != "gibbs_erm")
      fail("analyses.beta_sweep", "requires the gibbs_erm learner");
  }
  if (an.contains("halting_demo")) {
    const auto& a = an.at("halting_demo");
    check_keys(a, "analyses.halting_demo", {"corpus", "budgets", "train"}, {});
    as_string(a, "corpus", "analyses.halting_demo");
    const auto& budgets = a.at("budgets");
    if (!budgets.is_array() || budgets.empty())
      fail("analyses.halting_demo", "\"budgets\" must be a non-empty array");
    for (const auto& b : budgets) {
      if (!b.is_number_unsigned() &&
          !(b.is_number_integer() && b.get<std::int64_t>() >= 0))
        fail("analyses.halting_demo", "budgets must be non-negative integers");
    }
    parse_dataset(space, a.at("train"), "analyses.halting_demo.train");
  }
}

// Materialize defaults so the embedded config is self-describing.
ordered_json resolve_analyses(const ordered_json& an) {
  ordered_json out = ordered_json::object();
  const char* order[] = {"capacity", "sup_capacity", "time_indexed", "ldm",
                         "expressivity", "bias", "bounds", "complexity",
                         "vc", "diagnostics", "beta_sweep", "halting_demo"};
  for (const char* name : order) {
    if (!an.contains(name)) continue;
    ordered_json a = an.at(name);
    if (std::string(name) == "sup_capacity") {
      if (!a.contains("domain")) a["domain"] = "support";
      if (!a.contains("tol")) a["tol"] = 1e-9;
      if (!a.contains("max_iter")) a["max_iter"] = 100000;
      if (a.at("domain") == "iid") {
        if (!a.contains("starts")) a["starts"] = 8;
        if (!a.contains("passes")) a["passes"] = 60;
      }
    } else if (std::string(name) == "time_indexed") {
      if (!a.contains("variant")) a["variant"] = "fixed";
    } else if (std::string(name) == "ldm") {
      if (!a.contains("bootstrap")) a["bootstrap"] = 1000;
      if (!a.contains("level")) a["level"] = 0.95;
    } else if (std::string(name) == "complexity") {
      if (!a.contains("mc_samples")) a["mc_samples"] = 10000;
    } else if (std::string(name) == "vc") {
      if (!a.contains("classifiers")) a["classifiers"] = "thresholds";
      if (!a.contains("variant")) a["variant"] = "fixed";
    } else if (std::string(name) == "diagnostics") {
      if (!a.contains("slack")) a["slack"] = 0.0;
      if (!a.contains("mc_samples")) a["mc_samples"] = 10000;
      if (!a.contains("underfit_variant")) a["underfit_variant"] = "fixed";
    }
    out[name] = a;
  }
  return out;
}

// ---- CSV helpers --------------------------------------------------------------

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "INFINITE" : "NEGATIVE_INFINITE";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- analysis serialization ----------------------------------------------------

ordered_json verdict_json(const Verdict& v) {
  ordered_json j;
  j["kind"] = v.kind;
  j["decision"] = to_string(v.decision);
  j["lhs_bits"] = bits_json(v.lhs);
  j["rhs_bits"] = bits_json(v.rhs);
  if (v.degree) j["degree_bits"] = bits_json(*v.degree);
  j["detail"] = v.detail;
  return j;
}

ordered_json bound_json(const BoundReport& b) {
  ordered_json j;
  j["name"] = b.name;
  j["lhs_bits"] = bits_json(b.lhs);
  j["rhs_bits"] = bits_json(b.rhs);
  j["slack_bits"] = bits_json(b.slack);
  j["holds"] = b.holds;
  j["vacuous"] = b.vacuous;
  j["provenance"] = b.provenance == Provenance::Exact ? "EXACT" : "LDM_ESTIMATE";
  j["inputs_digest"] = b.inputs_digest;
  return j;
}

std::string bounds_csv(const std::vector<BoundReport>& rows) {
  std::string out = "name,lhs_bits,rhs_bits,slack_bits,holds,vacuous,provenance\n";
  for (const auto& b : rows) {
    out += b.name + "," + fmt_double(b.lhs) + "," + fmt_double(b.rhs) + "," +
           fmt_double(b.slack) + "," + (b.holds ? "1" : "0") + "," +
           (b.vacuous ? "1" : "0") + "," +
           (b.provenance == Provenance::Exact ? "EXACT" : "LDM_ESTIMATE") + "\n";
  }
  return out;
}

SimplexVector mean_row(const std::vector<SimplexVector>& rows) {
  std::vector<double> acc(rows.front().dim(), 0.0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += r[i];
  for (double& v : acc) v /= static_cast<double>(rows.size());
  return SimplexVector(std::move(acc));
}

/// Posterior-predictive hypothesis of a distribution over the space.
Hypothesis predictive_hypothesis(const HypothesisSpace& gspace,
                                 const SimplexVector& over_g) {
  const InstanceSpace& space = gspace.space();
  std::vector<SimplexVector> rows;
  rows.reserve(static_cast<std::size_t>(space.n_features));
  for (int x = 0; x < space.n_features; ++x) {
    std::vector<double> mix(static_cast<std::size_t>(space.n_labels), 0.0);
    for (std::size_t g = 0; g < gspace.size(); ++g) {
      const SimplexVector& prow = gspace.at(g).row(x);
      for (std::size_t y = 0; y < mix.size(); ++y) mix[y] += over_g[g] * prow[y];
    }
    rows.emplace_back(std::move(mix));
  }
  return Hypothesis(std::move(rows));
}

std::size_t argmax_index(const SimplexVector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.dim(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

ordered_json bits_json(double v) {
  if (std::isinf(v)) return v > 0 ? ordered_json("INFINITE")
                                  : ordered_json("NEGATIVE_INFINITE");
  return ordered_json(v);
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ExperimentConfig parse_config(const ordered_json& doc) {
  check_keys(doc, "top level",
             {"schema_version", "seed", "space", "hypothesis_space",
              "dataset_dist", "learner", "analyses"},
             {"mode"});
  ExperimentConfig cfg;
  const std::int64_t version = as_int(doc, "schema_version", "top level");
  if (version != 1) fail("top level", "\"schema_version\" must be 1");
  cfg.schema_version = 1;
  cfg.seed = as_u64(doc, "seed", "top level");
  const std::string mode = string_or(doc, "mode", "top level", "AVERAGED");
  if (mode == "FINAL")
    cfg.mode = Mode::Final;
  else if (mode == "AVERAGED")
    cfg.mode = Mode::Averaged;
  else
    fail("top level", "\"mode\" must be \"FINAL\" or \"AVERAGED\"");
  cfg.space = parse_space(doc.at("space"));

  const auto& hs = doc.at("hypothesis_space");
  check_keys(hs, "hypothesis_space", {"kind"}, {});
  cfg.hypothesis_space_kind = as_string(hs, "kind", "hypothesis_space");
  const std::set<std::string> hs_kinds = {"lookup_tables",
                                          "lookup_tables_with_mixed",
                                          "thresholds"};
  if (!hs_kinds.count(cfg.hypothesis_space_kind))
    fail("hypothesis_space", "unknown kind \"" + cfg.hypothesis_space_kind + "\"");
  if (cfg.hypothesis_space_kind == "thresholds" && cfg.space.n_labels != 2)
    fail("hypothesis_space", "thresholds require n_labels = 2");

  validate_dataset_dist(doc.at("dataset_dist"), cfg.space);
  cfg.dataset_dist = doc.at("dataset_dist");
  validate_learner(doc.at("learner"));
  cfg.learner = doc.at("learner");
  validate_analyses(doc.at("analyses"), cfg.space, cfg.learner);
  cfg.analyses = doc.at("analyses");

  ordered_json resolved;
  resolved["schema_version"] = 1;
  resolved["seed"] = cfg.seed;
  resolved["mode"] = to_string(cfg.mode);
  resolved["space"] = ordered_json{{"n_features", cfg.space.n_features},
                                   {"n_labels", cfg.space.n_labels}};
  resolved["hypothesis_space"] = ordered_json{{"kind", cfg.hypothesis_space_kind}};
  resolved["dataset_dist"] = cfg.dataset_dist;
  resolved["learner"] = cfg.learner;
  resolved["analyses"] = resolve_analyses(cfg.analyses);
  cfg.resolved = resolved;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(doc);
}

std::shared_ptr<const HypothesisSpace> build_hypothesis_space(
    const ExperimentConfig& cfg) {
  if (cfg.hypothesis_space_kind == "lookup_tables")
    return std::make_shared<HypothesisSpace>(
        HypothesisSpace::all_lookup_tables(cfg.space));
  if (cfg.hypothesis_space_kind == "lookup_tables_with_mixed")
    return std::make_shared<HypothesisSpace>(
        HypothesisSpace::lookup_tables_with_mixed(cfg.space));
  return std::make_shared<HypothesisSpace>(
      ClassifierClass::thresholds_on_line(cfg.space).to_hypothesis_space());
}

DatasetDistribution build_dataset_distribution(const ExperimentConfig& cfg) {
  const ordered_json& obj = cfg.dataset_dist;
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "iid_uniform")
    return DatasetDistribution::iid_uniform(cfg.space,
                                            obj.at("n").get<std::size_t>());
  if (kind == "iid") {
    std::vector<double> base = obj.at("base").get<std::vector<double>>();
    return DatasetDistribution::iid(cfg.space, obj.at("n").get<std::size_t>(),
                                    SimplexVector(std::move(base)));
  }
  std::vector<Dataset> support;
  for (const auto& d : obj.at("datasets"))
    support.push_back(parse_dataset(cfg.space, d, "dataset_dist.datasets"));
  if (kind == "explicit") {
    std::vector<double> probs = obj.at("probs").get<std::vector<double>>();
    return DatasetDistribution::explicit_support(std::move(support),
                                                 SimplexVector(std::move(probs)));
  }
  return DatasetDistribution::empirical(std::move(support));
}

LearnerProfile build_learner(const ExperimentConfig& cfg,
                             std::shared_ptr<const HypothesisSpace> gspace) {
  const std::string name = cfg.learner.at("name").get<std::string>();
  const LossFunction loss = LossFunction::zero_one();
  if (name == "memorizer") return memorizer(cfg.space, std::move(gspace));
  if (name == "anti_learner")
    return anti_learner(cfg.space, std::move(gspace), loss);
  if (name == "uniform_guesser") return uniform_guesser(std::move(gspace));
  if (name == "finite_erm") return finite_erm(std::move(gspace), loss);
  if (name == "gibbs_erm")
    return gibbs_erm(std::move(gspace), loss,
                     cfg.learner.at("beta").get<double>());
  return iterative_memorizer(cfg.space, std::move(gspace),
                             cfg.learner.at("iterations").get<std::size_t>());
}

RunResultBundle run_experiment(const ExperimentConfig& cfg, unsigned threads,
                               std::optional<std::string> corpus_root) {
  auto gspace = build_hypothesis_space(cfg);
  const DatasetDistribution dist = build_dataset_distribution(cfg);
  const LearnerProfile learner = build_learner(cfg, gspace);
  const LossFunction loss = LossFunction::zero_one();
  const ordered_json& an = cfg.analyses;

  RunResultBundle bundle;
  ordered_json& report = bundle.report;
  report["schema_version"] = 1;
  report["tool"] = ordered_json{{"name", kToolName}, {"version", kToolVersion}};
  report["timestamp"] = utc_timestamp();
  report["seed"] = cfg.seed;
  report["mode"] = to_string(cfg.mode);
  report["config"] = cfg.resolved;
  ordered_json results = ordered_json::object();

  std::optional<Channel> channel;
  const auto get_channel = [&]() -> const Channel& {
    if (!channel)
      channel = build_channel(learner, dist, cfg.mode, kDefaultEnumerationCap,
                              threads);
    return *channel;
  };
  std::optional<Ldm> ldm_rows;
  const auto get_ldm = [&]() -> const Ldm& {
    if (!ldm_rows) {
      const std::size_t k = an.at("ldm").at("k").get<std::size_t>();
      ldm_rows = build_ldm(learner, dist, k, cfg.seed, cfg.mode, threads);
    }
    return *ldm_rows;
  };

  // Orientation for expressivity/bias: exact when the support enumerates,
  // otherwise estimated from the LDM when that analysis is configured.
  const auto get_orientation = [&]() -> Orientation {
    try {
      return orientation(learner, dist, cfg.mode, kDefaultEnumerationCap,
                         threads);
    } catch (const CapacityLimitError&) {
      if (!an.contains("ldm")) throw;
      const Ldm& ldm = get_ldm();
      Orientation o;
      o.vec = mean_row(ldm.rows);
      o.mode = cfg.mode;
      o.provenance = Provenance::LdmEstimate;
      o.sample_size = ldm.rows.size();
      return o;
    }
  };

  const auto make_target = [&](std::optional<double> epsilon) -> TargetVector {
    if (epsilon)
      return target_from_risk(*gspace, dist.instance_marginal(), loss, *epsilon);
    TargetVector t;
    t.bits.assign(gspace->size(), 1);
    return t;
  };

  if (an.contains("capacity")) {
    ordered_json r;
    r["bits"] = bits_json(distributional_capacity(get_channel()));
    r["mode"] = to_string(cfg.mode);
    r["provenance"] = "EXACT";
    results["capacity"] = r;
  }

  if (an.contains("sup_capacity")) {
    const auto& a = an.at("sup_capacity");
    const std::string where = "analyses.sup_capacity";
    const std::string domain = string_or(a, "domain", where, "support");
    const double tol = double_or(a, "tol", where, 1e-9);
    const std::size_t max_iter = u64_or(a, "max_iter", where, 100000);
    ordered_json r;
    r["domain"] = domain;
    if (domain == "support") {
      const CapacityResult res = sup_capacity(get_channel(), tol, max_iter);
      r["bits"] = bits_json(res.value);
      r["bracket_low_bits"] = bits_json(res.bracket_low);
      r["bracket_high_bits"] = bits_json(res.bracket_high);
      r["iterations_used"] = res.iterations_used;
      r["converged"] = res.converged;
    } else {
      IidSearchConfig scfg;
      scfg.n_starts = static_cast<int>(u64_or(a, "starts", where, 8));
      scfg.max_passes = static_cast<int>(u64_or(a, "passes", where, 60));
      scfg.seed = cfg.seed;
      const IidCapacityResult res =
          iid_sup_capacity(learner, cfg.space, dist.length(), cfg.mode, scfg);
      r["bits"] = bits_json(res.value);
      r["certified"] = false;
      ordered_json base = ordered_json::array();
      for (std::size_t i = 0; i < res.base.dim(); ++i) base.push_back(res.base[i]);
      r["achieving_base"] = base;
    }
    results["sup_capacity"] = r;
  }

  if (an.contains("time_indexed")) {
    const std::string variant =
        string_or(an.at("time_indexed"), "variant", "analyses.time_indexed",
                  "fixed");
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 1; i <= learner.iterations; ++i) {
      ordered_json row;
      row["i"] = i;
      if (variant == "fixed") {
        row["bits"] = bits_json(time_indexed_capacity(
            learner, dist, i, kDefaultEnumerationCap, threads));
      } else {
        const CapacityResult res = time_indexed_sup_capacity(
            learner, cfg.space, dist.length(), i, 1e-9, 100000,
            kDefaultEnumerationCap, threads);
        row["bits"] = bits_json(res.value);
        row["converged"] = res.converged;
      }
      rows.push_back(row);
    }
    ordered_json r;
    r["variant"] = variant;
    r["iterations"] = rows;
    results["time_indexed"] = r;
  }

  if (an.contains("ldm")) {
    const auto& a = an.at("ldm");
    const std::string where = "analyses.ldm";
    const std::size_t n_boot = u64_or(a, "bootstrap", where, 1000);
    const double level = double_or(a, "level", where, 0.95);
    const Ldm& ldm = get_ldm();
    const LdmEstimate est = estimate_capacity(ldm);
    const BootstrapCi ci =
        bootstrap_ci(ldm, n_boot, derive_seed(cfg.seed, "ldm_bootstrap_master", 0),
                     level);
    ordered_json r;
    r["k"] = ldm.rows.size();
    r["capacity_hat_bits"] = bits_json(est.capacity_hat);
    r["h_mean_row_bits"] = bits_json(est.h_mean_row);
    r["mean_h_rows_bits"] = bits_json(est.mean_h_rows);
    r["ci_low_bits"] = bits_json(ci.low);
    r["ci_high_bits"] = bits_json(ci.high);
    r["ci_level"] = level;
    r["bootstrap_resamples"] = n_boot;
    r["matrix_csv"] = "ldm_matrix.csv";
    {
      std::string csv = "row,seed";
      for (std::size_t g = 0; g < gspace->size(); ++g)
        csv += ",p" + std::to_string(g);
      csv += "\n";
      for (std::size_t k = 0; k < ldm.rows.size(); ++k) {
        csv += std::to_string(k) + "," + std::to_string(ldm.seeds[k]);
        for (std::size_t g = 0; g < ldm.rows[k].dim(); ++g)
          csv += "," + fmt_double(ldm.rows[k][g]);
        csv += "\n";
      }
      bundle.csv_files.push_back({"ldm_matrix.csv", std::move(csv)});
    }
    if (a.contains("schedule")) {
      const std::vector<std::size_t> schedule =
          a.at("schedule").get<std::vector<std::size_t>>();
      const std::vector<TracePoint> trace = convergence_trace(
          learner, dist, schedule, cfg.seed, n_boot, cfg.mode, threads);
      ordered_json tr = ordered_json::array();
      std::string csv = "k,capacity_hat_bits,ci_low_bits,ci_high_bits\n";
      for (const TracePoint& p : trace) {
        ordered_json row;
        row["k"] = p.k;
        row["capacity_hat_bits"] = bits_json(p.capacity_hat);
        row["ci_low_bits"] = bits_json(p.ci_low);
        row["ci_high_bits"] = bits_json(p.ci_high);
        tr.push_back(row);
        csv += std::to_string(p.k) + "," + fmt_double(p.capacity_hat) + "," +
               fmt_double(p.ci_low) + "," + fmt_double(p.ci_high) + "\n";
      }
      r["trace"] = tr;
      r["trace_csv"] = "ldm_trace.csv";
      bundle.csv_files.push_back({"ldm_trace.csv", std::move(csv)});
    }
    results["ldm"] = r;
  }

  if (an.contains("expressivity")) {
    const Orientation o = get_orientation();
    ordered_json r;
    r["bits"] = bits_json(entropic_expressivity(o));
    r["log2_space_bits"] =
        bits_json(std::log2(static_cast<double>(gspace->size())));
    r["provenance"] =
        o.provenance == Provenance::Exact ? "EXACT" : "LDM_ESTIMATE";
    if (o.provenance == Provenance::LdmEstimate) r["sample_size"] = o.sample_size;
    r["orientation_csv"] = "orientation.csv";
    std::string csv = "hypothesis,mass\n";
    for (std::size_t g = 0; g < o.vec.dim(); ++g)
      csv += std::to_string(g) + "," + fmt_double(o.vec[g]) + "\n";
    bundle.csv_files.push_back({"orientation.csv", std::move(csv)});
    results["expressivity"] = r;
  }

  if (an.contains("bias")) {
    const double epsilon = an.at("bias").at("epsilon").get<double>();
    const TargetVector t = make_target(epsilon);
    const Orientation o = get_orientation();
    const TradeoffReport tr = tradeoff_check(o, t);
    ordered_json r;
    r["epsilon"] = epsilon;
    r["target_size"] = t.ones();
    r["target_degenerate"] = t.degenerate();
    r["bias"] = bits_json(tr.bias_value);
    r["per_query_success"] = bits_json(per_query_success(o, t));
    r["expressivity_bits"] = bits_json(tr.expressivity);
    r["slack_entropy_bits"] = bits_json(tr.slack_entropy);
    r["slack_bias"] = bits_json(tr.slack_bias);
    r["holds"] = tr.holds;
    r["provenance"] =
        o.provenance == Provenance::Exact ? "EXACT" : "LDM_ESTIMATE";
    results["bias"] = r;
  }

  if (an.contains("bounds")) {
    std::optional<double> epsilon;
    if (an.at("bounds").contains("epsilon"))
      epsilon = an.at("bounds").at("epsilon").get<double>();
    const TargetVector t = make_target(epsilon);
    const std::vector<BoundReport> rows = bound_suite(get_channel(), t);
    ordered_json arr = ordered_json::array();
    bool all_hold = true;
    for (const auto& b : rows) {
      arr.push_back(bound_json(b));
      all_hold = all_hold && (b.holds || b.vacuous);
    }
    ordered_json r;
    if (epsilon) r["epsilon"] = *epsilon;
    r["all_hold"] = all_hold;
    r["rows"] = arr;
    r["csv"] = "bounds.csv";
    bundle.csv_files.push_back({"bounds.csv", bounds_csv(rows)});
    results["bounds"] = r;
  }

  if (an.contains("complexity")) {
    const std::size_t mc =
        u64_or(an.at("complexity"), "mc_samples", "analyses.complexity", 10000);
    const ExpectedComplexity ec = expected_dataset_complexity(
        dist, kDefaultEnumerationCap, mc, cfg.seed, threads);
    ordered_json r;
    r["expected_bits"] = bits_json(ec.value);
    r["std_error_bits"] = bits_json(ec.std_error);
    r["exact"] = ec.exact;
    r["samples"] = ec.samples;
    results["complexity"] = r;
  }

  if (an.contains("vc")) {
    const auto& a = an.at("vc");
    const std::string classifiers =
        string_or(a, "classifiers", "analyses.vc", "thresholds");
    const std::string variant = string_or(a, "variant", "analyses.vc", "fixed");
    const ClassifierClass cls =
        classifiers == "thresholds"
            ? ClassifierClass::thresholds_on_line(cfg.space)
            : ClassifierClass::full_tables(cfg.space);
    const VcBoundReport rep = vc_capacity_bound_check(
        learner, cls, dist,
        variant == "fixed" ? VcCheckMode::FixedDist : VcCheckMode::Sup,
        kDefaultEnumerationCap, threads);
    ordered_json r;
    r["classifiers"] = classifiers;
    r["variant"] = variant;
    r["n_classifiers"] = cls.size();
    r["capacity_bits"] = bits_json(rep.capacity_bits);
    r["growth_value"] = rep.growth_value;
    r["bound_bits"] = bits_json(rep.bound_bits);
    r["distinct_rows"] = rep.distinct_rows;
    r["applicable"] = rep.applicable;
    r["holds"] = rep.holds;
    r["note"] = rep.note;
    r["vc_dim"] = rep.vc_dim;
    r["log2_vc_dim"] = bits_json(rep.log2_vc_dim);
    results["vc"] = r;
  }

  if (an.contains("diagnostics")) {
    const auto& a = an.at("diagnostics");
    const std::string where = "analyses.diagnostics";
    const double slack = double_or(a, "slack", where, 0.0);
    const std::size_t mc = u64_or(a, "mc_samples", where, 10000);
    const std::string underfit_variant =
        string_or(a, "underfit_variant", where, "fixed");
    const double cap_bits = distributional_capacity(get_channel());
    const ExpectedComplexity ec = expected_dataset_complexity(
        dist, kDefaultEnumerationCap, mc, cfg.seed, threads);
    ordered_json r;
    r["capacity_bits"] = bits_json(cap_bits);
    r["expected_complexity_bits"] = bits_json(ec.value);
    r["expected_complexity_exact"] = ec.exact;
    r["capacity_overfit"] = verdict_json(capacity_overfit(cap_bits, ec.value, slack));
    ordered_json under = ordered_json::array();
    for (std::size_t i = 1; i <= learner.iterations; ++i) {
      under.push_back(verdict_json(underfit_at(
          learner, dist, i, ec.value,
          underfit_variant == "fixed" ? UnderfitMode::FixedDist
                                      : UnderfitMode::Sup,
          kDefaultEnumerationCap, threads)));
    }
    r["underfit"] = under;
    if (a.contains("train")) {
      const Dataset d = parse_dataset(cfg.space, a.at("train"), where + ".train");
      const Channel& ch = get_channel();
      std::size_t d_index = ch.input_support.size();
      for (std::size_t i = 0; i < ch.input_support.size(); ++i) {
        if (ch.input_support[i] == d) {
          d_index = i;
          break;
        }
      }
      if (d_index == ch.input_support.size())
        throw ValidationError(
            "analyses.diagnostics.train: dataset not in the support");
      const SimplexVector final_row = learner.row_for(d, Mode::Final);
      const Hypothesis mix = predictive_hypothesis(*gspace, final_row);
      r["observational_overfit"] =
          verdict_json(observational_overfit(mix, d, dist, loss));
      const std::size_t g = argmax_index(ch.rows[d_index]);
      ordered_json mo = verdict_json(model_overfit(ch, g, d_index));
      mo["hypothesis_index"] = g;
      r["model_overfit"] = mo;
      r["train_dataset_probability"] = bits_json(dist.dataset_probability(d));
    }
    results["diagnostics"] = r;
  }

  if (an.contains("beta_sweep")) {
    const auto& a = an.at("beta_sweep");
    const std::vector<double> betas = a.at("betas").get<std::vector<double>>();
    std::optional<double> epsilon;
    if (a.contains("epsilon")) epsilon = a.at("epsilon").get<double>();
    const TargetVector t = make_target(epsilon);
    ordered_json rows = ordered_json::array();
    std::string csv = "beta,capacity_bits,expressivity_bits,bias\n";
    for (double beta : betas) {
      const LearnerProfile lb = gibbs_erm(gspace, loss, beta);
      const Channel ch =
          build_channel(lb, dist, cfg.mode, kDefaultEnumerationCap, threads);
      const double cap_bits = distributional_capacity(ch);
      const Orientation o = orientation_of_channel(ch);
      const double expr = entropic_expressivity(o);
      const double b = bias(o, t);
      ordered_json row;
      row["beta"] = beta;
      row["capacity_bits"] = bits_json(cap_bits);
      row["expressivity_bits"] = bits_json(expr);
      row["bias"] = bits_json(b);
      rows.push_back(row);
      csv += fmt_double(beta) + "," + fmt_double(cap_bits) + "," +
             fmt_double(expr) + "," + fmt_double(b) + "\n";
    }
    ordered_json r;
    if (epsilon) r["epsilon"] = *epsilon;
    r["rows"] = rows;
    r["csv"] = "beta_sweep.csv";
    bundle.csv_files.push_back({"beta_sweep.csv", std::move(csv)});
    results["beta_sweep"] = r;
  }

  if (an.contains("halting_demo")) {
    const auto& a = an.at("halting_demo");
    const std::string where = "analyses.halting_demo";
    std::filesystem::path corpus_path = as_string(a, "corpus", where);
    if (corpus_path.is_relative() && corpus_root)
      corpus_path = std::filesystem::path(*corpus_root) / corpus_path;
    std::ifstream in(corpus_path);
    if (!in)
      throw ValidationError("analyses.halting_demo: cannot open corpus " +
                            corpus_path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::vector<CorpusEntry> corpus = parse_corpus(buffer.str());
    if (corpus.empty())
      throw ValidationError("analyses.halting_demo: empty corpus");
    const std::vector<std::uint64_t> budgets =
        a.at("budgets").get<std::vector<std::uint64_t>>();
    const Dataset train = parse_dataset(cfg.space, a.at("train"), where + ".train");
    ordered_json rows = ordered_json::array();
    std::string csv = "program,budget,halted,steps,phase,verdict,agree\n";
    std::size_t n_cases = 0;
    std::size_t n_agree = 0;
    for (const CorpusEntry& entry : corpus) {
      const APrime ap =
          build_a_prime(entry.program, entry.input, train, gspace, loss);
      for (std::uint64_t budget : budgets) {
        const IffReport rep = overfit_iff_halts(ap, dist, loss, budget);
        ++n_cases;
        n_agree += rep.agree ? 1 : 0;
        ordered_json row;
        row["program"] = entry.name;
        row["budget"] = budget;
        row["halted"] = rep.halted;
        row["steps"] = rep.steps;
        row["phase"] = to_string(rep.phase);
        row["verdict"] = verdict_json(rep.verdict);
        row["agree"] = rep.agree;
        rows.push_back(row);
        csv += entry.name + "," + std::to_string(budget) + "," +
               (rep.halted ? "1" : "0") + "," + std::to_string(rep.steps) + "," +
               to_string(rep.phase) + "," + to_string(rep.verdict.decision) +
               "," + (rep.agree ? "1" : "0") + "\n";
      }
    }
    ordered_json r;
    r["programs"] = corpus.size();
    r["cases"] = n_cases;
    r["agreement_rate"] =
        n_cases == 0 ? 0.0 : static_cast<double>(n_agree) / n_cases;
    r["rows"] = rows;
    r["csv"] = "halting.csv";
    bundle.csv_files.push_back({"halting.csv", std::move(csv)});
    results["halting_demo"] = r;
  }

  report["results"] = results;
  return bundle;
}

}  // namespace caplab
