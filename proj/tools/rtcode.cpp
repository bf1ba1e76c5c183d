#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtcode/mdp.hpp"
#include "rtcode/montecarlo.hpp"
#include "rtcode/search.hpp"

namespace {

constexpr const char* kToolVersion = "rtcode 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitBudget = 3;

struct Options {
  std::string command;
  std::string spec_path;
  std::string out_path;
  std::string solver = "tracking";
  std::string encoder_path;
  std::string decoder_path;
  std::vector<double> lambda_grid;
  int zy_size = 2;
  int window = 1;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::uint64_t budget = 10000000;
  int threads = 0;  // 0 = machine parallelism
};

nlohmann::json config_json(const Options& opt) {
  return {{"command", opt.command},     {"spec", opt.spec_path},
          {"out", opt.out_path},        {"solver", opt.solver},
          {"lambda_grid", opt.lambda_grid}, {"zy_size", opt.zy_size},
          {"window", opt.window},       {"trials", opt.trials},
          {"seed", opt.seed},           {"budget", opt.budget},
          {"threads", opt.threads}};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rtcode::SpecError("cannot open output file: " + path);
  out << text;
}

void write_json(const Options& opt, nlohmann::json doc) {
  doc["tool_version"] = kToolVersion;
  doc["config"] = config_json(opt);
  doc["seed"] = opt.seed;
  // nlohmann::json objects iterate in sorted key order, so dumps are
  // deterministic and diff-friendly.
  write_text(opt.out_path, doc.dump(2) + "\n");
}

rtcode::SearchOptions search_options(const Options& opt) {
  rtcode::SearchOptions so;
  so.budget = opt.budget;
  so.threads = opt.threads > 0
                   ? opt.threads
                   : std::max(1u, std::thread::hardware_concurrency());
  return so;
}

rtcode::SearchResult run_solver(const rtcode::ProblemSpec& spec,
                                const Options& opt) {
  const auto so = search_options(opt);
  if (opt.solver == "tracking") return optimize_tracking_infinite(spec, so);
  if (opt.solver == "system")
    return optimize_system(spec, opt.zy_size, so);
  if (opt.solver == "window")
    return optimize_sliding_window(spec, opt.window, so);
  if (opt.solver == "mdp") {
    const rtcode::ValueTable table = solve_backward(spec, opt.budget);
    rtcode::SearchResult result;
    result.infinite = extract_encoder(spec, table);
    result.report = evaluate_infinite_memory(spec, *result.infinite);
    result.best_cost = table.optimal_cost;
    std::uint64_t states = 0;
    for (const auto& stage : table.per_stage) states += stage.size();
    result.candidates_evaluated = states;
    return result;
  }
  throw rtcode::SpecError("unknown solver: " + opt.solver);
}

int cmd_validate(const Options& opt) {
  const rtcode::ProblemSpec spec = rtcode::load_spec(opt.spec_path);
  nlohmann::json doc;
  doc["valid"] = true;
  doc["spec"] = rtcode::spec_to_json(spec);
  write_json(opt, std::move(doc));
  return kExitOk;
}

int cmd_optimize(const Options& opt) {
  const rtcode::ProblemSpec spec = rtcode::load_spec(opt.spec_path);
  const rtcode::SearchResult result = run_solver(spec, opt);
  write_json(opt, rtcode::search_result_to_json(result));
  return kExitOk;
}

int cmd_sweep(const Options& opt) {
  if (opt.lambda_grid.empty())
    throw rtcode::SpecError("sweep requires --lambda-grid");
  for (std::size_t i = 0; i < opt.lambda_grid.size(); ++i) {
    if (opt.lambda_grid[i] < 0.0)
      throw rtcode::SpecError("lambda grid values must be >= 0");
    if (i > 0 && opt.lambda_grid[i] <= opt.lambda_grid[i - 1])
      throw rtcode::SpecError("lambda grid must be strictly increasing");
  }
  rtcode::ProblemSpec spec = rtcode::load_spec(opt.spec_path);

  std::ostringstream csv;
  csv << "lambda,avg_distortion,avg_length,cost,solver\n";
  for (double lambda : opt.lambda_grid) {
    spec.lambda = lambda;
    const rtcode::SearchResult result = run_solver(spec, opt);
    csv << lambda << ',' << result.report.avg_distortion << ','
        << result.report.avg_length << ',' << result.best_cost << ','
        << opt.solver << '\n';
  }
  write_text(opt.out_path, csv.str());
  return kExitOk;
}

int cmd_verify(const Options& opt) {
  const rtcode::ProblemSpec spec = rtcode::load_spec(opt.spec_path);
  const auto so = search_options(opt);
  rtcode::Rng rng(opt.seed);

  std::vector<rtcode::TheoremReport> reports;
  if (spec.has_si()) {
    const auto dec = sample_si_decoder(spec, spec.zy_size, rng);
    reports.push_back(check_theorem6(spec, dec, so));
  } else {
    const auto dec = sample_decoder(spec, spec.zy_size, rng);
    reports.push_back(
        check_theorem1(spec, dec, static_cast<int>(opt.trials), opt.seed,
                       so));
    reports.push_back(check_theorem3(spec, opt.zy_size, opt.window, so));

    // Cross-check: backward induction against brute force.
    rtcode::TheoremReport mdp_check;
    mdp_check.name = "theorem2_mdp";
    mdp_check.lhs = rtcode::solve_backward(spec, opt.budget).optimal_cost;
    mdp_check.rhs = optimize_tracking_infinite(spec, so).best_cost;
    mdp_check.slack = mdp_check.lhs - mdp_check.rhs;
    mdp_check.holds = std::abs(mdp_check.slack) <= rtcode::kCompareTol;
    reports.push_back(std::move(mdp_check));
  }

  bool all_hold = true;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& report : reports) {
    all_hold = all_hold && report.holds;
    list.push_back(rtcode::theorem_report_to_json(report));
  }
  write_json(opt, nlohmann::json{{"checks", std::move(list)},
                                 {"all_hold", all_hold}});
  return all_hold ? kExitOk : kExitCheckFailed;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rtcode::SpecError("cannot open file: " + path);
  nlohmann::json doc;
  in >> doc;
  return doc;
}

int cmd_simulate(const Options& opt) {
  const rtcode::ProblemSpec spec = rtcode::load_spec(opt.spec_path);
  rtcode::Rng rng(rtcode::derive_seed(opt.seed, 0));

  rtcode::SimResult result;
  double exact = 0.0;
  if (spec.has_si()) {
    const rtcode::TrackingEncoder enc =
        opt.encoder_path.empty()
            ? sample_tracking(spec, spec.zy_size, rng)
            : rtcode::tracking_encoder_from_json(load_json(opt.encoder_path));
    const rtcode::SiDecoderPolicy dec =
        opt.decoder_path.empty()
            ? sample_si_decoder(spec, spec.zy_size, rng)
            : rtcode::si_decoder_from_json(load_json(opt.decoder_path));
    result = simulate_si(spec, enc, dec, opt.trials, opt.seed);
    exact = evaluate_cost_si(spec, enc, dec).total;
  } else {
    const rtcode::TrackingEncoder enc =
        opt.encoder_path.empty()
            ? sample_tracking(spec, spec.zy_size, rng)
            : rtcode::tracking_encoder_from_json(load_json(opt.encoder_path));
    const rtcode::DecoderPolicy dec =
        opt.decoder_path.empty()
            ? sample_decoder(spec, spec.zy_size, rng)
            : rtcode::decoder_from_json(load_json(opt.decoder_path));
    result = simulate(spec, enc, dec, opt.trials, opt.seed);
    exact = evaluate_cost(spec, enc, dec).total;
  }

  nlohmann::json doc = rtcode::sim_result_to_json(result);
  doc["exact_cost"] = exact;
  write_json(opt, std::move(doc));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time variable-rate coding designer and verifier"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", opt.spec_path, "problem spec JSON file")
        ->required();
    sub->add_option("--out", opt.out_path, "output file (default: stdout)");
    sub->add_option("--seed", opt.seed, "master RNG seed");
    sub->add_option("--budget", opt.budget, "max enumeration candidates");
    sub->add_option("--threads", opt.threads,
                    "worker threads (0 = machine parallelism)");
    return sub;
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--solver", opt.solver,
                    "one of tracking, system, window, mdp")
        ->check(CLI::IsMember({"tracking", "system", "window", "mdp"}));
    sub->add_option("--zy-size", opt.zy_size, "decoder state count");
    sub->add_option("--window", opt.window, "sliding window length l");
  };

  add_common(app.add_subcommand("validate", "parse and validate a spec"));

  auto* optimize = add_common(
      app.add_subcommand("optimize", "search for an optimal system"));
  add_solver(optimize);

  auto* sweep = add_common(
      app.add_subcommand("sweep", "optimize along a lambda grid (CSV out)"));
  add_solver(sweep);
  sweep->add_option("--lambda-grid", opt.lambda_grid,
                    "strictly increasing lambda values")
      ->delimiter(',');

  auto* verify = add_common(
      app.add_subcommand("verify", "run structure-theorem checks"));
  add_solver(verify);
  verify->add_option("--trials", opt.trials,
                     "stochastic encoder samples per check");

  auto* simulate = add_common(
      app.add_subcommand("simulate", "Monte Carlo trajectory simulation"));
  simulate->add_option("--trials", opt.trials, "trajectory count");
  simulate->add_option("--encoder", opt.encoder_path, "encoder policy JSON");
  simulate->add_option("--decoder", opt.decoder_path, "decoder policy JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  opt.command = app.get_subcommands().front()->get_name();
  try {
    if (opt.command == "validate") return cmd_validate(opt);
    if (opt.command == "optimize") return cmd_optimize(opt);
    if (opt.command == "sweep") return cmd_sweep(opt);
    if (opt.command == "verify") return cmd_verify(opt);
    if (opt.command == "simulate") return cmd_simulate(opt);
    std::cerr << "unknown command: " << opt.command << "\n";
    return kExitBadInput;
  } catch (const rtcode::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const rtcode::SpecError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}
