#pragma once

// Campaign orchestration and on-disk state.
//
// Directory layout:
//   campaign.json        configuration and every result computed so far
//   runs/run_NN.csv      rim profile of design run NN (contour CSV)
//   runs/baseline.csv    circular reference blank, written by verify
//   runs/optimum.csv     optimal blank, written by verify
//   reports/*.svg        plots, reports/summary.txt
//
// Lifecycle: configured -> designed -> simulated -> fitted -> optimized -> verified.
// Re-running a stage discards everything downstream of it.

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "earforge/csv.hpp"
#include "earforge/doe.hpp"
#include "earforge/errors.hpp"
#include "earforge/geometry.hpp"
#include "earforge/modal.hpp"
#include "earforge/optimizer.hpp"
#include "earforge/plant.hpp"
#include "earforge/rsm.hpp"
#include "earforge/svg.hpp"

namespace earforge {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kStateFileName = "campaign.json";
inline constexpr std::string_view kLockFileName = "campaign.lock";

struct OptimizerConfig {
  std::size_t grid_resolution = 21;
  std::size_t max_starts = 64;
  std::vector<Interval> bounds{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

struct CampaignConfig {
  FactorSpace factor_space = FactorSpace::blank_default();
  double target_height = 35.0;
  /// Finished cup used to size the circular reference blank.
  CupSpec cup{66.03, 35.0};
  MaterialAnisotropy material = MaterialAnisotropy::dc05();
  SurrogateParams surrogate;
  std::size_t n_modes = kDefaultModeCount;
  std::size_t n_nodes = kQuarterNodes;
  std::size_t n_points = kDefaultContourPoints;
  OptimizerConfig optimizer;

  void validate() const {
    factor_space.validate();
    if (factor_space.size() != 3) throw ValidationError("campaign factor space must be (D, A1, A2)");
    if (!(target_height > 0.0)) throw ValidationError("target height must be positive");
    cup.validate();
    material.validate();
    surrogate.validate();
    if (n_modes < 2 || n_modes > n_nodes) throw ValidationError("mode count must be in [2, n_nodes]");
    if (n_points < 8 || n_points % 4 != 0) throw ValidationError("n_points must be >= 8 and a multiple of 4");
    if (optimizer.bounds.size() != factor_space.size()) throw ValidationError("optimizer bounds must match factors");
    if (optimizer.grid_resolution < 2) throw ValidationError("optimizer grid needs at least 2 points per axis");
  }
};

enum class Stage { configured, designed, simulated, fitted, optimized, verified };

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::configured: return "configured";
    case Stage::designed: return "designed";
    case Stage::simulated: return "simulated";
    case Stage::fitted: return "fitted";
    case Stage::optimized: return "optimized";
    case Stage::verified: return "verified";
  }
  return "unknown";
}

struct ProfileRef {
  std::string file;
  std::string sha256;
};

struct RunRecord {
  std::size_t run = 0;
  PointRole role = PointRole::center;
  std::vector<double> normalized;
  BlankSpec blank;
  ProfileRef profile;
  std::string provenance;
  ModalCoordinates coords;
};

struct VerificationRecord {
  BlankSpec blank;
  ProfileRef profile;
  ModalCoordinates coords;
  double ear_amplitude = 0.0;
  BlankSpec baseline_blank;
  ProfileRef baseline_profile;
  ModalCoordinates baseline_coords;
  double baseline_amplitude = 0.0;
  /// Baseline amplitude / optimum amplitude; empty when the optimum has no ears.
  std::optional<double> reduction_factor;
  std::string provenance;
};

struct CampaignState {
  CampaignConfig config;
  std::optional<DesignMatrix> design;
  std::vector<RunRecord> runs;
  std::vector<QuadraticModel> models;
  std::optional<Optimum> optimum;
  std::optional<VerificationRecord> verification;
  /// Timestamps and other bookkeeping; not part of the reproducible result.
  Json meta = Json::object();

  Stage stage() const {
    if (verification) return Stage::verified;
    if (optimum) return Stage::optimized;
    if (!models.empty()) return Stage::fitted;
    if (!runs.empty()) return Stage::simulated;
    if (design) return Stage::designed;
    return Stage::configured;
  }

  void check_lifecycle() const {
    if (!runs.empty() && !design) throw LifecycleError("campaign has runs but no design");
    if (design && !runs.empty() && runs.size() != design->size()) {
      throw LifecycleError("campaign has " + std::to_string(runs.size()) + " runs for a " +
                           std::to_string(design->size()) + "-point design");
    }
    if (!models.empty() && runs.empty()) throw LifecycleError("campaign has fitted models but no runs");
    if (optimum && models.empty()) throw LifecycleError("campaign has an optimum but no fitted models");
    if (verification && !optimum) throw LifecycleError("campaign has a verification but no optimum");
  }
};

inline CampaignState new_campaign(CampaignConfig config = {}) {
  config.validate();
  CampaignState s;
  s.config = std::move(config);
  return s;
}

// ---------------------------------------------------------------------------
// hashing and locking

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot read '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw NumericError("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

/// Advisory single-writer lock on `<dir>/campaign.lock`, released on destruction.
class CampaignLock {
 public:
  /// Only `init` may create the directory; elsewhere a missing directory is a fresh state.
  explicit CampaignLock(const std::filesystem::path& dir, bool create = false) {
    if (create) {
      std::filesystem::create_directories(dir);
    } else if (!std::filesystem::is_directory(dir)) {
      throw FreshStateError("no campaign in '" + dir.string() + "'; run `earforge init` first");
    }
    const auto path = dir / kLockFileName;
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw ValidationError("cannot open lock file '" + path.string() + "': " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw ValidationError("campaign '" + dir.string() + "' is locked by another process");
    }
  }
  CampaignLock(const CampaignLock&) = delete;
  CampaignLock& operator=(const CampaignLock&) = delete;
  ~CampaignLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }

 private:
  int fd_ = -1;
};

// ---------------------------------------------------------------------------
// JSON

namespace json_io {

inline Json blank(const BlankSpec& b) { return Json{{"D", b.diameter}, {"A1", b.a1}, {"A2", b.a2}}; }

inline BlankSpec blank(const Json& j) { return {j.at("D").get<double>(), j.at("A1").get<double>(), j.at("A2").get<double>()}; }

inline Json coords(const ModalCoordinates& c) { return Json{{"lambda", c.lambda}, {"residue", c.residue}}; }

inline ModalCoordinates coords(const Json& j) {
  return {j.at("lambda").get<std::vector<double>>(), j.at("residue").get<double>()};
}

inline Json profile(const ProfileRef& p) { return Json{{"file", p.file}, {"sha256", p.sha256}}; }

inline ProfileRef profile(const Json& j) { return {j.at("file").get<std::string>(), j.at("sha256").get<std::string>()}; }

inline Json config(const CampaignConfig& c) {
  Json factors = Json::array();
  for (const auto& f : c.factor_space.factors) {
    factors.push_back(Json{{"name", f.name}, {"center", f.center}, {"half_range", f.half_range}});
  }
  Json bounds = Json::array();
  for (const auto& b : c.optimizer.bounds) bounds.push_back(Json::array({b.lower, b.upper}));
  const auto& s = c.surrogate;
  return Json{
      {"factor_space", Json{{"alpha", c.factor_space.alpha}, {"factors", factors}}},
      {"target_height_mm", c.target_height},
      {"cup", Json{{"diameter_mm", c.cup.cup_diameter}, {"height_mm", c.cup.cup_height}}},
      {"material", Json{{"r0", c.material.r0}, {"r45", c.material.r45}, {"r90", c.material.r90}}},
      {"surrogate", Json{{"ref_diameter", s.ref_diameter},
                         {"base_height", s.base_height},
                         {"k_d", s.k_d},
                         {"k_q", s.k_q},
                         {"g2", s.g2},
                         {"g4", s.g4},
                         {"c_ear", s.c_ear},
                         {"kappa4_6", s.kappa4_6},
                         {"c8", s.c8}}},
      {"n_modes", c.n_modes},
      {"n_nodes", c.n_nodes},
      {"n_points", c.n_points},
      {"optimizer", Json{{"grid_resolution", c.optimizer.grid_resolution},
                         {"max_starts", c.optimizer.max_starts},
                         {"bounds", bounds}}},
  };
}

inline CampaignConfig config(const Json& j) {
  CampaignConfig c;
  const auto& fs = j.at("factor_space");
  c.factor_space.alpha = fs.at("alpha").get<double>();
  c.factor_space.factors.clear();
  for (const auto& f : fs.at("factors")) {
    c.factor_space.factors.push_back(
        {f.at("name").get<std::string>(), f.at("center").get<double>(), f.at("half_range").get<double>()});
  }
  c.target_height = j.at("target_height_mm").get<double>();
  c.cup = {j.at("cup").at("diameter_mm").get<double>(), j.at("cup").at("height_mm").get<double>()};
  const auto& m = j.at("material");
  c.material = {m.at("r0").get<double>(), m.at("r45").get<double>(), m.at("r90").get<double>()};
  const auto& s = j.at("surrogate");
  c.surrogate = {s.at("ref_diameter").get<double>(), s.at("base_height").get<double>(), s.at("k_d").get<double>(),
                 s.at("k_q").get<double>(),          s.at("g2").get<double>(),          s.at("g4").get<double>(),
                 s.at("c_ear").get<double>(),        s.at("kappa4_6").get<double>(),    s.at("c8").get<double>()};
  c.n_modes = j.at("n_modes").get<std::size_t>();
  c.n_nodes = j.at("n_nodes").get<std::size_t>();
  c.n_points = j.at("n_points").get<std::size_t>();
  const auto& o = j.at("optimizer");
  c.optimizer.grid_resolution = o.at("grid_resolution").get<std::size_t>();
  c.optimizer.max_starts = o.at("max_starts").get<std::size_t>();
  c.optimizer.bounds.clear();
  for (const auto& b : o.at("bounds")) c.optimizer.bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  return c;
}

/// Named coefficient map in term order plus diagnostics.
inline Json model(const QuadraticModel& m) {
  Json coefficients = Json::object();
  const auto names = m.term_names();
  for (std::size_t k = 0; k < names.size(); ++k) coefficients[names[k]] = m.coefficients[k];
  return Json{{"response", m.response},
              {"factors", m.factor_names},
              {"coefficients", coefficients},
              {"diagnostics", Json{{"residual_rms", m.diagnostics.residual_rms},
                                   {"max_abs_residual", m.diagnostics.max_abs_residual}}}};
}

inline QuadraticModel model(const Json& j) {
  QuadraticModel m;
  m.response = j.at("response").get<std::string>();
  m.factor_names = j.at("factors").get<std::vector<std::string>>();
  const auto& c = j.at("coefficients");
  for (const auto& name : m.term_names()) {
    if (!c.contains(name)) throw ValidationError("model '" + m.response + "' is missing coefficient '" + name + "'");
    m.coefficients.push_back(c.at(name).get<double>());
  }
  m.diagnostics = {j.at("diagnostics").at("residual_rms").get<double>(),
                   j.at("diagnostics").at("max_abs_residual").get<double>()};
  m.validate();
  return m;
}

inline Json optimum(const Optimum& o, const FactorSpace& space, const std::vector<QuadraticModel>& models) {
  Json physical = Json::object();
  for (std::size_t k = 0; k < space.size(); ++k) physical[space.factors[k].name] = o.physical.at(k);
  Json predicted = Json::object();
  for (std::size_t k = 0; k < models.size(); ++k) predicted[models[k].response] = o.predicted.at(k);
  return Json{{"normalized", o.normalized},
              {"physical", physical},
              {"F", o.f},
              {"predicted", predicted},
              {"convergence", Json{{"grid_points", o.report.grid_points},
                                   {"starts", o.report.starts},
                                   {"iterations", o.report.iterations},
                                   {"gradient_norm", o.report.gradient_norm}}}};
}

inline Optimum optimum(const Json& j, const FactorSpace& space, const std::vector<QuadraticModel>& models) {
  Optimum o;
  o.normalized = j.at("normalized").get<std::vector<double>>();
  for (const auto& f : space.factors) o.physical.push_back(j.at("physical").at(f.name).get<double>());
  o.f = j.at("F").get<double>();
  for (const auto& m : models) o.predicted.push_back(j.at("predicted").at(m.response).get<double>());
  const auto& c = j.at("convergence");
  o.report = {c.at("grid_points").get<std::size_t>(), c.at("starts").get<std::size_t>(),
              c.at("iterations").get<std::size_t>(), c.at("gradient_norm").get<double>()};
  return o;
}

inline Json verification(const VerificationRecord& v) {
  return Json{{"blank", blank(v.blank)},
              {"profile", profile(v.profile)},
              {"modal", coords(v.coords)},
              {"ear_amplitude_mm", v.ear_amplitude},
              {"baseline_blank", blank(v.baseline_blank)},
              {"baseline_profile", profile(v.baseline_profile)},
              {"baseline_modal", coords(v.baseline_coords)},
              {"baseline_amplitude_mm", v.baseline_amplitude},
              {"reduction_factor", v.reduction_factor ? Json(*v.reduction_factor) : Json(nullptr)},
              {"provenance", v.provenance}};
}

inline VerificationRecord verification(const Json& j) {
  VerificationRecord v;
  v.blank = blank(j.at("blank"));
  v.profile = profile(j.at("profile"));
  v.coords = coords(j.at("modal"));
  v.ear_amplitude = j.at("ear_amplitude_mm").get<double>();
  v.baseline_blank = blank(j.at("baseline_blank"));
  v.baseline_profile = profile(j.at("baseline_profile"));
  v.baseline_coords = coords(j.at("baseline_modal"));
  v.baseline_amplitude = j.at("baseline_amplitude_mm").get<double>();
  if (!j.at("reduction_factor").is_null()) v.reduction_factor = j.at("reduction_factor").get<double>();
  v.provenance = j.at("provenance").get<std::string>();
  return v;
}

}  // namespace json_io

inline Json state_to_json(const CampaignState& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["stage"] = std::string(to_string(s.stage()));
  j["config"] = json_io::config(s.config);
  if (s.design) {
    Json design = Json::array();
    for (std::size_t r = 0; r < s.design->size(); ++r) {
      const auto& p = s.design->points[r];
      design.push_back(Json{{"run", r + 1},
                            {"role", std::string(to_string(p.role))},
                            {"normalized", p.coords},
                            {"physical", to_physical(s.config.factor_space, p.coords)}});
    }
    j["design"] = design;
  }
  if (!s.runs.empty()) {
    Json runs = Json::array();
    for (const auto& r : s.runs) {
      runs.push_back(Json{{"run", r.run},
                          {"role", std::string(to_string(r.role))},
                          {"normalized", r.normalized},
                          {"blank", json_io::blank(r.blank)},
                          {"profile", json_io::profile(r.profile)},
                          {"provenance", r.provenance},
                          {"modal", json_io::coords(r.coords)}});
    }
    j["runs"] = runs;
  }
  if (!s.models.empty()) {
    Json models = Json::array();
    for (const auto& m : s.models) models.push_back(json_io::model(m));
    j["models"] = models;
  }
  if (s.optimum) j["optimum"] = json_io::optimum(*s.optimum, s.config.factor_space, s.models);
  if (s.verification) j["verification"] = json_io::verification(*s.verification);
  j["meta"] = s.meta;
  return j;
}

inline std::string state_to_string(const CampaignState& s) { return state_to_json(s).dump(2) + "\n"; }

inline CampaignState state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("schema_version") || !j.at("schema_version").is_number_integer()) {
    throw MigrationNeededError("campaign file has no schema version; migration needed");
  }
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion) {
    throw MigrationNeededError("campaign schema version " + std::to_string(version) + " needs migration to version " +
                               std::to_string(kSchemaVersion));
  }
  try {
    CampaignState s;
    s.config = json_io::config(j.at("config"));
    s.config.validate();
    if (j.contains("design")) {
      DesignMatrix d;
      d.factor_count = s.config.factor_space.size();
      for (const auto& p : j.at("design")) {
        d.points.push_back({point_role_from_string(p.at("role").get<std::string>()),
                            p.at("normalized").get<std::vector<double>>()});
      }
      s.design = std::move(d);
    }
    if (j.contains("runs")) {
      for (const auto& r : j.at("runs")) {
        RunRecord rec;
        rec.run = r.at("run").get<std::size_t>();
        rec.role = point_role_from_string(r.at("role").get<std::string>());
        rec.normalized = r.at("normalized").get<std::vector<double>>();
        rec.blank = json_io::blank(r.at("blank"));
        rec.profile = json_io::profile(r.at("profile"));
        rec.provenance = r.at("provenance").get<std::string>();
        rec.coords = json_io::coords(r.at("modal"));
        s.runs.push_back(std::move(rec));
      }
    }
    if (j.contains("models")) {
      for (const auto& m : j.at("models")) s.models.push_back(json_io::model(m));
    }
    if (j.contains("optimum")) s.optimum = json_io::optimum(j.at("optimum"), s.config.factor_space, s.models);
    if (j.contains("verification")) s.verification = json_io::verification(j.at("verification"));
    if (j.contains("meta")) s.meta = j.at("meta");
    s.check_lifecycle();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed campaign file: ") + e.what());
  }
}

inline void save_state(const std::filesystem::path& dir, const CampaignState& s) {
  s.check_lifecycle();
  std::filesystem::create_directories(dir);
  const auto tmp = dir / (std::string(kStateFileName) + ".tmp");
  csv::write_text(tmp, state_to_string(s));
  std::filesystem::rename(tmp, dir / kStateFileName);
}

inline void check_profile(const std::filesystem::path& dir, const ProfileRef& ref, const std::string& owner) {
  const auto path = dir / ref.file;
  if (!std::filesystem::exists(path)) {
    throw IntegrityError(owner + ": profile file '" + ref.file + "' is missing");
  }
  if (sha256_file(path) != ref.sha256) {
    throw IntegrityError(owner + ": profile file '" + ref.file + "' does not match its recorded hash");
  }
}

inline CampaignState load_state(const std::filesystem::path& dir) {
  const auto path = dir / kStateFileName;
  if (!std::filesystem::exists(path)) {
    throw FreshStateError("no campaign in '" + dir.string() + "'; run `earforge init` first");
  }
  std::ifstream in(path, std::ios::binary);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cannot parse '" + path.string() + "': " + e.what());
  }
  CampaignState s = state_from_json(j);
  for (const auto& r : s.runs) check_profile(dir, r.profile, "run " + std::to_string(r.run));
  if (s.verification) {
    check_profile(dir, s.verification->profile, "verification");
    check_profile(dir, s.verification->baseline_profile, "verification baseline");
  }
  return s;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// stages

inline void require_stage(const CampaignState& s, Stage needed, std::string_view action, std::string_view command) {
  if (static_cast<int>(s.stage()) < static_cast<int>(needed)) {
    throw LifecycleError("cannot " + std::string(action) + ": campaign is '" + std::string(to_string(s.stage())) +
                         "'; run `" + std::string(command) + "` first");
  }
}

inline void run_design_stage(CampaignState& s) {
  s.config.validate();
  s.design = ccd_design(s.config.factor_space);
  s.runs.clear();
  s.models.clear();
  s.optimum.reset();
  s.verification.reset();
}

inline ModalBasis campaign_basis(const CampaignConfig& c) { return build_modal_basis(c.n_nodes, c.n_modes); }

inline std::unique_ptr<Plant> make_plant(const CampaignConfig& c,
                                         const std::optional<std::filesystem::path>& ingest_dir = std::nullopt) {
  if (ingest_dir) return std::make_unique<IngestPlant>(*ingest_dir, c.material, c.n_points);
  return std::make_unique<SurrogatePlant>(c.material, c.surrogate, c.n_points);
}

inline ProfileRef store_profile(const std::filesystem::path& dir, const std::string& relative,
                                const ContourProfile& profile) {
  csv::write_contour(dir / relative, profile);
  return {relative, sha256_file(dir / relative)};
}

inline void run_simulate_stage(CampaignState& s, const std::filesystem::path& dir, const Plant& plant) {
  require_stage(s, Stage::designed, "simulate", "design");
  const ModalBasis basis = campaign_basis(s.config);
  const auto results = run_design_detailed(*s.design, s.config.factor_space, plant, basis,
                                           {s.config.target_height, s.config.n_modes});
  std::vector<RunRecord> runs;
  for (std::size_t r = 0; r < results.runs.size(); ++r) {
    RunRecord rec;
    rec.run = r + 1;
    rec.role = s.design->points[r].role;
    rec.normalized = s.design->points[r].coords;
    rec.blank = results.runs[r].blank;
    rec.profile = store_profile(dir, "runs/" + run_id(r + 1) + ".csv", results.runs[r].profile);
    rec.provenance = results.runs[r].provenance.label();
    rec.coords = results.coordinates[r];
    runs.push_back(std::move(rec));
  }
  s.runs = std::move(runs);
  s.models.clear();
  s.optimum.reset();
  s.verification.reset();
}

inline ResponseTable campaign_responses(const CampaignState& s) {
  ResponseTable table;
  table.names = mode_names(s.config.n_modes);
  for (const auto& r : s.runs) table.rows.push_back(r.coords.lambda);
  return table;
}

inline std::vector<std::string> factor_names(const FactorSpace& space) {
  std::vector<std::string> names;
  for (const auto& f : space.factors) names.push_back(f.name);
  return names;
}

inline void run_fit_stage(CampaignState& s) {
  require_stage(s, Stage::simulated, "fit", "simulate");
  s.models = fit_quadratic(*s.design, campaign_responses(s), factor_names(s.config.factor_space));
  s.optimum.reset();
  s.verification.reset();
}

inline void run_optimize_stage(CampaignState& s) {
  require_stage(s, Stage::fitted, "optimize", "fit");
  ObjectiveSpec spec{s.models, s.config.optimizer.bounds};
  MinimizeOptions options;
  options.grid_resolution = s.config.optimizer.grid_resolution;
  options.max_starts = s.config.optimizer.max_starts;
  s.optimum = minimize(spec, s.config.factor_space, options);
  s.verification.reset();
}

/// Runs the optimal blank and the circular reference blank (diameter sized
/// from the cup) through the plant and compares their ear amplitudes.
inline VerificationRecord verify_optimum(CampaignState& s, const std::filesystem::path& dir, const Plant& plant) {
  require_stage(s, Stage::optimized, "verify", "optimize");
  const ModalBasis basis = campaign_basis(s.config);

  VerificationRecord v;
  v.blank = blank_from_physical(s.optimum->physical);
  const PlantRun opt = plant.run(v.blank, "optimum");
  v.profile = store_profile(dir, "runs/optimum.csv", opt.profile);
  v.coords = decompose(opt.profile, s.config.target_height, basis, s.config.n_modes);
  v.ear_amplitude = ear_amplitude(opt.profile);

  v.baseline_blank = {initial_blank_diameter(s.config.cup), 0.0, 0.0};
  const PlantRun base = plant.run(v.baseline_blank, "baseline");
  v.baseline_profile = store_profile(dir, "runs/baseline.csv", base.profile);
  v.baseline_coords = decompose(base.profile, s.config.target_height, basis, s.config.n_modes);
  v.baseline_amplitude = ear_amplitude(base.profile);

  if (v.ear_amplitude > 1e-12) v.reduction_factor = v.baseline_amplitude / v.ear_amplitude;
  v.provenance = opt.provenance.label();
  s.verification = v;
  return v;
}

// ---------------------------------------------------------------------------
// reports

struct ReportResult {
  std::vector<std::string> written;
  std::vector<std::string> missing;
};

inline ContourProfile load_profile(const std::filesystem::path& dir, const ProfileRef& ref) {
  return ContourProfile::from_samples(csv::read_polar_samples(dir / ref.file));
}

inline std::string summary_table(const CampaignState& s) {
  const auto& v = *s.verification;
  const auto& o = *s.optimum;
  std::string out;
  auto line = [&out](const std::string& text) { out += text + "\n"; };
  char buf[256];
  line("Optimal blank");
  for (std::size_t k = 0; k < s.config.factor_space.size(); ++k) {
    std::snprintf(buf, sizeof buf, "  %-4s %12.5f  (normalized %+.5f)", s.config.factor_space.factors[k].name.c_str(),
                  o.physical[k], o.normalized[k]);
    line(buf);
  }
  std::snprintf(buf, sizeof buf, "  F    %12.6g", o.f);
  line(buf);
  line("");
  std::string header = "           ";
  for (std::size_t i = 0; i < s.config.n_modes; ++i) {
    std::snprintf(buf, sizeof buf, "%12s", ("L" + std::to_string(i + 1)).c_str());
    header += buf;
  }
  line(header + "   amplitude");
  auto row = [&](const char* label, const std::vector<double>& lambda, std::optional<double> amp) {
    std::string r;
    std::snprintf(buf, sizeof buf, "%-11s", label);
    r += buf;
    for (double l : lambda) {
      std::snprintf(buf, sizeof buf, "%12.4e", l);
      r += buf;
    }
    if (amp) {
      std::snprintf(buf, sizeof buf, "%12.4f", *amp);
      r += buf;
    }
    line(r);
  };
  row("predicted", o.predicted, std::nullopt);
  row("optimum", v.coords.lambda, v.ear_amplitude);
  row("nominal", v.baseline_coords.lambda, v.baseline_amplitude);
  line("");
  if (v.reduction_factor) {
    std::snprintf(buf, sizeof buf, "Ear amplitude reduction factor: %.2f", *v.reduction_factor);
  } else {
    std::snprintf(buf, sizeof buf, "Ear amplitude reduction factor: n/a (optimum has no ears)");
  }
  line(buf);
  return out;
}

/// Writes every report whose data is present; `missing` lists the rest.
inline ReportResult write_reports(const CampaignState& s, const std::filesystem::path& dir) {
  ReportResult result;
  const auto reports = dir / "reports";
  auto emit = [&](const std::string& name, const std::string& content) {
    csv::write_text(reports / name, content);
    result.written.push_back("reports/" + name);
  };
  const auto modes = mode_names(s.config.n_modes);

  if (!s.runs.empty()) {
    std::vector<std::string> categories;
    for (const auto& r : s.runs) categories.push_back(std::to_string(r.run));
    std::vector<svg::Series> series;
    for (std::size_t i = 0; i < s.config.n_modes; ++i) {
      svg::Series ser{modes[i], {}};
      for (const auto& r : s.runs) ser.values.push_back(r.coords.lambda.at(i));
      series.push_back(std::move(ser));
    }
    emit("modal_runs.svg", svg::bar_chart("Modal coordinates per design run", categories, series, "lambda (mm)"));
  } else {
    result.missing.push_back("modal_runs.svg (needs simulated runs: run `simulate`)");
  }

  if (!s.models.empty()) {
    std::vector<svg::Series> series;
    for (const auto& f : s.config.factor_space.factors) {
      svg::Series ser{f.name, {}};
      for (const auto& m : s.models) ser.values.push_back(std::abs(m.coefficient(f.name)));
      series.push_back(std::move(ser));
    }
    emit("influence.svg", svg::bar_chart("Linear influence of blank parameters", modes, series,
                                         "|coefficient| (mm per unit)"));
  } else {
    result.missing.push_back("influence.svg (needs fitted models: run `fit`)");
  }

  if (s.verification) {
    const auto& v = *s.verification;
    emit("modal_bars.svg", svg::bar_chart("Nominal vs optimum modal decomposition", modes,
                                          {{"nominal", v.baseline_coords.lambda}, {"optimum", v.coords.lambda}},
                                          "lambda (mm)"));
    const auto base = load_profile(dir, v.baseline_profile);
    const auto opt = load_profile(dir, v.profile);
    std::vector<double> theta;
    std::vector<double> dev_base;
    std::vector<double> dev_opt;
    for (const auto& p : base.samples()) {
      theta.push_back(p.theta);
      dev_base.push_back(p.value - s.config.target_height);
    }
    for (const auto& p : opt.samples()) dev_opt.push_back(p.value - s.config.target_height);
    emit("deviation_polar.svg",
         svg::polar_chart("Rim deviation around target height", theta, {{"nominal", dev_base}, {"optimum", dev_opt}}));
    emit("overlay.svg", svg::line_chart("Nominal and optimum deviations", theta,
                                        {{"nominal", dev_base}, {"optimum", dev_opt}}, "deviation (mm)"));
    emit("summary.txt", summary_table(s));
  } else {
    for (const char* name : {"modal_bars.svg", "deviation_polar.svg", "overlay.svg", "summary.txt"}) {
      result.missing.push_back(std::string(name) + " (needs a verified optimum: run `verify`)");
    }
  }
  return result;
}

}  // namespace earforge
