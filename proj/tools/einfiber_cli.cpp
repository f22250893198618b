// Command line driver for the verification library.
//
// Subcommands:
//   verify   run every check for the configured ranks, emit a JSON report
//   sweep    regularity margin over the (t, direction) grid
//   base     CSV export of base samples of the undeformed pencil
//   chern    winding number of the rank-three fiber field
//   domain   scan reduced-word thickenings against pencil base samples
//
// Exit codes: 0 all checks passed; 1 a check failed; 2 invalid
// configuration or usage; 3 file I/O error.

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <einfiber/verify.hpp>

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Per-subcommand option set. Flags override values read from --config.
struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::vector<int> p_list;
  std::uint64_t seed = 0;
  int t_steps = 0, dir_steps = 0, word_length = 0;
  int n_u = 0, n_fiber = 0, n_base = 0, equator_steps = 1024;

  CLI::Option* p_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* t_opt = nullptr;
  CLI::Option* dir_opt = nullptr;
  CLI::Option* wl_opt = nullptr;
  CLI::Option* nu_opt = nullptr;
  CLI::Option* nf_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "flat JSON key-value configuration file");
    cmd->add_option("--out", out_path, "output file (default: stdout)");
    p_opt = cmd->add_option("--p", p_list, "comma-separated ranks, each >= 3")
                ->delimiter(',');
    seed_opt = cmd->add_option("--seed", seed, "base RNG seed");
    t_opt = cmd->add_option("--t-steps", t_steps, "deformation grid size");
    dir_opt = cmd->add_option("--dir-steps", dir_steps, "direction grid size");
    wl_opt = cmd->add_option("--word-length", word_length,
                             "reduced-word cutoff for domain scans");
    nu_opt = cmd->add_option("--n-u", n_u, "base sphere sample count");
    nf_opt = cmd->add_option("--n-fiber", n_fiber,
                             "fiber directions per base point");
  }

  einfiber::RunConfig resolve() const {
    einfiber::RunConfig cfg;
    if (!config_path.empty()) {
      const std::string text = read_text_file(config_path);
      nlohmann::ordered_json doc;
      try {
        doc = nlohmann::ordered_json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
      }
      cfg = einfiber::config_from_json(doc);
    }
    if (p_opt && p_opt->count()) cfg.p_list = p_list;
    if (seed_opt && seed_opt->count()) cfg.seed = seed;
    if (t_opt && t_opt->count()) cfg.t_steps = t_steps;
    if (dir_opt && dir_opt->count()) cfg.dir_steps = dir_steps;
    if (wl_opt && wl_opt->count()) cfg.word_length = word_length;
    if (nu_opt && nu_opt->count()) cfg.n_u = n_u;
    if (nf_opt && nf_opt->count()) cfg.n_fiber = n_fiber;
    einfiber::validate(cfg);
    return cfg;
  }
};

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text_file(out_path, text);
  }
}

void print_check_lines(const std::vector<einfiber::CheckReport>& checks) {
  for (const einfiber::CheckReport& c : checks)
    std::fprintf(stderr, "%-26s %s  max_residual=%.3e  n=%lld\n",
                 c.name.c_str(), c.passed ? "pass" : "FAIL", c.max_residual,
                 static_cast<long long>(c.n_samples));
}

int emit_report(const einfiber::RunConfig& cfg,
                const std::vector<einfiber::CheckReport>& checks,
                const std::vector<std::string>& notes,
                const std::string& out_path) {
  const nlohmann::ordered_json doc = einfiber::report_document(
      einfiber::config_to_json(cfg), utc_timestamp(), checks, notes);
  emit(out_path, doc.dump(2) + "\n");
  print_check_lines(checks);
  bool all = true;
  for (const einfiber::CheckReport& c : checks) all = all && c.passed;
  std::fprintf(stderr, "%zu checks: %s\n", checks.size(),
               all ? "all passed" : "FAILURES PRESENT");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale verification of pencil fiber structures in the "
               "Einstein universe"};
  app.require_subcommand(1);

  CommonOpts verify_opts, sweep_opts, base_opts, chern_opts, domain_opts;

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run all checks and emit a JSON report");
  verify_opts.attach(verify_cmd);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "regularity margins over the (t, dir) grid");
  sweep_opts.attach(sweep_cmd);

  CLI::App* base_cmd =
      app.add_subcommand("base", "CSV export of pencil base samples");
  base_opts.attach(base_cmd);

  CLI::App* chern_cmd = app.add_subcommand(
      "chern", "winding number of the rank-three fiber field");
  chern_opts.attach(chern_cmd);
  chern_cmd->add_option("--equator-steps", chern_opts.equator_steps,
                        "equator subdivision (>= 256)");

  CLI::App* domain_cmd = app.add_subcommand(
      "domain", "scan word thickenings against pencil base samples");
  domain_opts.attach(domain_cmd);
  domain_cmd->add_option("--n-base", domain_opts.n_base,
                         "total base sample count (rounded up to 4 per point)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (verify_cmd->parsed()) {
      const einfiber::RunConfig cfg = verify_opts.resolve();
      const std::vector<einfiber::CheckReport> checks =
          einfiber::run_verify(cfg);
      return emit_report(cfg, checks, einfiber::run_notes(cfg),
                         verify_opts.out_path);
    }

    if (sweep_cmd->parsed()) {
      const einfiber::RunConfig cfg = sweep_opts.resolve();
      std::vector<einfiber::CheckReport> checks;
      for (int p : cfg.p_list)
        checks.push_back(einfiber::check_regularity_sweep(
            p, cfg.t_steps, cfg.dir_steps, cfg.rank_rel));
      return emit_report(cfg, checks, {}, sweep_opts.out_path);
    }

    if (base_cmd->parsed()) {
      const einfiber::RunConfig cfg = base_opts.resolve();
      emit(base_opts.out_path, einfiber::export_base_csv(cfg));
      return 0;
    }

    if (chern_cmd->parsed()) {
      const einfiber::RunConfig cfg = chern_opts.resolve();
      (void)cfg;  // seed-free: the fiber field is deterministic
      const std::vector<einfiber::CheckReport> checks = {
          einfiber::check_chern_winding_p3(chern_opts.equator_steps)};
      return emit_report(cfg, checks, {}, chern_opts.out_path);
    }

    if (domain_cmd->parsed()) {
      einfiber::RunConfig cfg = domain_opts.resolve();
      if (domain_cmd->count("--n-base")) {
        if (domain_opts.n_base <= 0)
          throw std::invalid_argument("config: n_base must be positive");
        cfg.n_fiber = 4;
        cfg.n_u = (domain_opts.n_base + 3) / 4;
      }
      std::vector<einfiber::CheckReport> checks;
      for (int p : cfg.p_list)
        checks.push_back(einfiber::check_domain_cross(
            p, cfg.word_length, cfg.n_u, cfg.n_fiber, cfg.seed,
            cfg.gap_threshold, cfg.containment));
      return emit_report(cfg, checks, {}, domain_opts.out_path);
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 2;
}
