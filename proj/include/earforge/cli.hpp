#pragma once

// Command-line front end. Exit codes: 0 success, 2 invalid input or state,
// 3 numeric failure, 1 anything unexpected.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"

#include "earforge/campaign.hpp"
#include "earforge/csv.hpp"
#include "earforge/errors.hpp"
#include "earforge/modal.hpp"
#include "earforge/plant.hpp"

namespace earforge {

inline constexpr const char* kCampaignEnv = "EARFORGE_CAMPAIGN";

namespace cli_detail {

namespace fs = std::filesystem;

struct Options {
  std::string campaign;
  bool force = false;
  double init_target = 35.0;
  std::string ingest_dir;
  std::string profile;
  double target = 35.0;
  std::size_t modes = kDefaultModeCount;
  std::size_t points = kDefaultContourPoints;
  std::string out;
};

inline fs::path campaign_dir(const Options& o) {
  if (o.campaign.empty()) {
    throw ValidationError(std::string("no campaign directory: pass --campaign <dir> or set ") + kCampaignEnv);
  }
  return o.campaign;
}

inline void stamp_and_save(const fs::path& dir, CampaignState& s) {
  s.meta["updated_at"] = utc_timestamp();
  save_state(dir, s);
}

inline std::optional<fs::path> ingest(const Options& o) {
  if (o.ingest_dir.empty()) return std::nullopt;
  return fs::path(o.ingest_dir);
}

inline std::string fmt(double v) { return csv::format_number(v); }

inline int cmd_init(const Options& o, std::ostream& out) {
  const fs::path dir = campaign_dir(o);
  CampaignLock lock(dir, true);
  if (fs::exists(dir / kStateFileName) && !o.force) {
    throw ValidationError("campaign already exists in '" + dir.string() + "'; use --force to overwrite");
  }
  CampaignConfig config;
  config.target_height = o.init_target;
  CampaignState s = new_campaign(config);
  s.meta["created_at"] = utc_timestamp();
  stamp_and_save(dir, s);
  out << "initialized campaign in " << dir.string() << "\n";
  return 0;
}

inline int cmd_design(const Options& o, std::ostream& out) {
  const fs::path dir = campaign_dir(o);
  CampaignLock lock(dir);
  CampaignState s = load_state(dir);
  run_design_stage(s);
  csv::write_text(dir / "design.csv", csv::design_to_string(*s.design, s.config.factor_space));
  stamp_and_save(dir, s);
  out << "designed " << s.design->size() << " runs -> " << (dir / "design.csv").string() << "\n";
  return 0;
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
  const fs::path dir = campaign_dir(o);
  CampaignLock lock(dir);
  CampaignState s = load_state(dir);
  const auto plant = make_plant(s.config, ingest(o));
  run_simulate_stage(s, dir, *plant);
  stamp_and_save(dir, s);
  out << "simulated " << s.runs.size() << " runs (" << s.runs.front().provenance << ")\n";
  return 0;
}

inline int cmd_fit(const Options& o, std::ostream& out) {
  const fs::path dir = campaign_dir(o);
  CampaignLock lock(dir);
  CampaignState s = load_state(dir);
  run_fit_stage(s);
  stamp_and_save(dir, s);
  for (const auto& m : s.models) {
    out << m.response << ": rms residual " << fmt(m.diagnostics.residual_rms) << ", dominant linear factor "
        << dominant_linear_factor(m) << "\n";
  }
  return 0;
}

inline int cmd_optimize(const Options& o, std::ostream& out) {
  const fs::path dir = campaign_dir(o);
  CampaignLock lock(dir);
  CampaignState s = load_state(dir);
  run_optimize_stage(s);
  stamp_and_save(dir, s);
  const auto& opt = *s.optimum;
  out << "optimum:";
  for (std::size_t k = 0; k < s.config.factor_space.size(); ++k) {
    out << " " << s.config.factor_space.factors[k].name << "=" << fmt(opt.physical[k]);
  }
  out << " F=" << fmt(opt.f) << "\n";
  return 0;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  const fs::path dir = campaign_dir(o);
  CampaignLock lock(dir);
  CampaignState s = load_state(dir);
  const auto plant = make_plant(s.config, ingest(o));
  const VerificationRecord v = verify_optimum(s, dir, *plant);
  stamp_and_save(dir, s);
  out << "optimum ear amplitude " << fmt(v.ear_amplitude) << " mm, circular blank " << fmt(v.baseline_amplitude)
      << " mm, reduction factor " << (v.reduction_factor ? fmt(*v.reduction_factor) : std::string("n/a")) << "\n";
  return 0;
}

inline int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const fs::path dir = campaign_dir(o);
  CampaignLock lock(dir);
  const CampaignState s = load_state(dir);
  const ReportResult r = write_reports(s, dir);
  for (const auto& w : r.written) out << "wrote " << w << "\n";
  if (r.missing.empty()) return 0;
  err << "missing reports:\n";
  for (const auto& m : r.missing) err << "  " << m << "\n";
  return 2;
}

inline int cmd_decompose(const Options& o, std::ostream& out) {
  const ContourProfile profile = ingest_profile(o.profile, o.points);
  const ModalBasis basis = build_modal_basis(kQuarterNodes, std::max<std::size_t>(o.modes, 2));
  const ModalCoordinates coords = decompose(profile, o.target, basis, o.modes);
  const std::string text = csv::modal_to_string(coords);
  if (o.out.empty()) {
    out << text;
  } else {
    csv::write_text(o.out, text);
    out << "wrote " << o.out << "\n";
  }
  return 0;
}

}  // namespace cli_detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  Options o;
  CLI::App app{"earforge: earing compensation by modal decomposition and response surfaces"};
  app.name("earforge");
  app.require_subcommand(1, 1);
  app.add_option("--campaign", o.campaign, "campaign directory")->envname(kCampaignEnv);

  auto* init = app.add_subcommand("init", "write a default campaign configuration");
  init->add_flag("--force", o.force, "overwrite an existing campaign");
  init->add_option("--target", o.init_target, "target rim height in mm")->capture_default_str();
  auto* design = app.add_subcommand("design", "generate the central composite design");
  auto* simulate = app.add_subcommand("simulate", "run every design point through the plant");
  simulate->add_option("--ingest-dir", o.ingest_dir, "read run_NN.csv profiles from this directory");
  auto* fit = app.add_subcommand("fit", "fit quadratic response surfaces to the modal coordinates");
  auto* optimize = app.add_subcommand("optimize", "minimize the sum of squared predicted modal coordinates");
  auto* verify = app.add_subcommand("verify", "re-run the optimal and circular blanks and compare ear amplitudes");
  verify->add_option("--ingest-dir", o.ingest_dir, "read optimum.csv and baseline.csv from this directory");
  auto* report = app.add_subcommand("report", "write SVG plots and a summary table");
  auto* decomp = app.add_subcommand("decompose", "modal decomposition of a single rim profile");
  decomp->add_option("profile", o.profile, "contour or point-cloud CSV")->required();
  decomp->add_option("--target", o.target, "target height in mm")->capture_default_str();
  decomp->add_option("--modes", o.modes, "number of modes")->capture_default_str()->check(CLI::Range(1, 36));
  decomp->add_option("--points", o.points, "resampling grid size")->capture_default_str();
  decomp->add_option("--out", o.out, "write the modal CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*init) return cmd_init(o, out);
    if (*design) return cmd_design(o, out);
    if (*simulate) return cmd_simulate(o, out);
    if (*fit) return cmd_fit(o, out);
    if (*optimize) return cmd_optimize(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*report) return cmd_report(o, out, err);
    if (*decomp) return cmd_decompose(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace earforge
