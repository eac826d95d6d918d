// Command-line front end: run, serve, replay, render and eval.
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "madphys/core/error.hpp"
#include "madphys/harness/baselines.hpp"
#include "madphys/harness/config.hpp"
#include "madphys/harness/environments.hpp"
#include "madphys/harness/episode.hpp"
#include "madphys/harness/presets.hpp"
#include "madphys/harness/record.hpp"
#include "madphys/harness/render.hpp"
#include "madphys/harness/wire.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace madphys;
using namespace madphys::harness;

namespace {

struct ConfigSource {
  std::string path;
  std::string preset;  // "<environment>/<name>"
  std::string scale = "quick";
  std::optional<std::uint64_t> seed;
  bool disclose_truth = false;

  void add_options(CLI::App& app) {
    app.add_option("-c,--config", path, "Episode configuration (JSON)");
    app.add_option("-p,--preset", preset, "Built-in configuration, e.g. classical/kappa10");
    app.add_option("--scale", scale, "Preset scale")->check(CLI::IsMember({"quick", "paper"}));
    app.add_option("-s,--seed", seed, "Override the configuration seed");
    app.add_flag("--disclose-truth", disclose_truth, "Include true answers in prediction queries (testing)");
  }

  EpisodeConfig load() const {
    if (path.empty() == preset.empty()) throw ConfigError("give exactly one of --config or --preset");
    EpisodeConfig config;
    if (!path.empty()) {
      config = load_episode_config(path);
    } else {
      const auto slash = preset.find('/');
      if (slash == std::string::npos) throw ConfigError("preset must look like <environment>/<name>");
      config = make_preset(parse_environment_kind(preset.substr(0, slash)), preset.substr(slash + 1),
                           parse_preset_scale(scale));
    }
    if (seed) config.seed = *seed;
    if (disclose_truth) config.disclose_truth = true;
    config.validate();
    return config;
  }
};

std::string format_score(const std::optional<double>& score) {
  if (!score) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", *score);
  return buf;
}

int cmd_run(const ConfigSource& source, const std::string& agent_name, const std::string& log_path) {
  const EpisodeConfig config = source.load();
  std::vector<EpisodeRecord> records;
  if (agent_name == "stdio") {
    // The agent speaks the wire protocol on our stdin/stdout.
    LineChannel channel(STDIN_FILENO, STDOUT_FILENO, false);
    records = serve_channel(channel, config, "episode");
  } else {
    auto agent = make_baseline(parse_baseline_policy(agent_name), config.seed);
    records = run_trials(config, *agent);
  }
  if (!log_path.empty()) write_records(log_path, records, true);
  for (const auto& r : records)
    std::cerr << r.episode_id << " status=" << r.status << " " << r.metric << "=" << format_score(r.score) << "\n";
  return 0;
}

int cmd_serve(const ConfigSource& source, int port, const std::string& socket_path, int max_connections,
              const std::string& log_path) {
  const EpisodeConfig config = source.load();
  EpisodeServer server(config, [&](const std::vector<EpisodeRecord>& records) {
    if (!log_path.empty()) write_records(log_path, records, true);
    for (const auto& r : records)
      std::cerr << r.episode_id << " status=" << r.status << " " << r.metric << "=" << format_score(r.score) << "\n";
  });
  if (!socket_path.empty()) {
    server.listen_unix(socket_path);
    std::cerr << "listening on unix:" << socket_path << std::endl;
  } else {
    const int bound = server.listen_tcp(port);
    std::cout << "listening on 127.0.0.1:" << bound << std::endl;
  }
  server.serve(max_connections);
  return 0;
}

int cmd_replay(const std::string& log_path) {
  int failures = 0;
  for (const auto& record : read_records(log_path)) {
    const ReplayResult result = replay(record);
    std::cout << record.episode_id << " identical=" << (result.identical ? "yes" : "no")
              << " score=" << format_score(result.score) << " logged=" << format_score(record.score);
    if (!result.identical) {
      std::cout << " first_mismatch=" << result.first_mismatch.value_or(-2) << " (" << result.detail << ")";
      ++failures;
    }
    std::cout << "\n";
  }
  return failures == 0 ? 0 : 1;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write " + path.string());
}

std::vector<std::uint8_t> render_state(const EpisodeEnvironment& env, int size) {
  if (const auto* c = dynamic_cast<const ClassicalEnvironment*>(&env))
    return render_classical(c->simulation().state(), c->simulation().config(), size);
  if (const auto* f = dynamic_cast<const FluidEnvironment*>(&env))
    return encode_png(render_heatmap(f->solver().to_physical(f->field()), size));
  const auto& q = dynamic_cast<const QuantumEnvironment&>(env);
  const auto& psi = q.state();
  numerics::RealGrid2D density(psi.n, psi.n, psi.domain[0], psi.domain[1]);
  density.values = quantum::marginal_density(psi, 1, q.config().p);
  return encode_png(render_heatmap(density, size));
}

// Frames of the true state at the time of every accepted observation.
int cmd_render(const std::string& log_path, const std::string& out_dir, int size) {
  fs::create_directories(out_dir);
  int frames = 0;
  for (const auto& record : read_records(log_path)) {
    const EpisodeConfig config = episode_config_from_json(record.config);
    std::unique_ptr<EpisodeEnvironment> env = make_environment(config);
    const fs::path base = fs::path(out_dir) / record.episode_id;
    write_bytes(base.string() + "-frame000.png", render_state(*env, size));
    int index = 1;
    for (const auto& entry : record.transcript) {
      if (entry.response.value("type", "") != "observation") continue;
      const json& payload = entry.response.at("payload");
      if (!payload.contains("step")) continue;
      const auto step = payload["step"].get<std::int64_t>();
      if (step < env->step()) env = make_environment(config);
      env->advance_to_step(step);
      char name[32];
      std::snprintf(name, sizeof name, "-frame%03d.png", index++);
      write_bytes(base.string() + name, render_state(*env, size));
    }
    frames += index;
    std::cerr << record.episode_id << ": " << index << " frames\n";
  }
  std::cout << frames << " frames written to " << out_dir << "\n";
  return 0;
}

int cmd_eval(const std::vector<std::string>& environments, const std::vector<std::string>& policies, int seeds,
             const std::string& scale_name, const std::string& csv_path, const std::string& log_path) {
  const PresetScale scale = parse_preset_scale(scale_name);
  std::ofstream file;
  if (!csv_path.empty()) {
    file.open(csv_path);
    if (!file) throw Error("cannot write " + csv_path);
  }
  std::ostream& csv = csv_path.empty() ? std::cout : file;
  csv << "environment,configuration,policy,runs,completed,mean_error,std_error\n";
  for (const auto& env_name : environments) {
    const EnvironmentKind kind = parse_environment_kind(env_name);
    for (const auto& preset : preset_names(kind)) {
      for (const auto& policy_name : policies) {
        const BaselinePolicy policy = parse_baseline_policy(policy_name);
        std::vector<double> scores;
        int completed = 0;
        for (int s = 0; s < seeds; ++s) {
          const EpisodeConfig config = make_preset(kind, preset, scale, static_cast<std::uint64_t>(s));
          auto agent = make_baseline(policy, config.seed);
          const auto records = run_trials(config, *agent, env_name + "-" + preset + "-" + policy_name + "-s" +
                                                              std::to_string(s));
          if (!log_path.empty()) write_records(log_path, records, true);
          for (const auto& r : records) {
            if (r.status == "completed") ++completed;
            if (r.score) scores.push_back(*r.score);
          }
        }
        double mean = 0.0, var = 0.0;
        for (double v : scores) mean += v;
        if (!scores.empty()) mean /= static_cast<double>(scores.size());
        for (double v : scores) var += (v - mean) * (v - mean);
        if (scores.size() > 1) var /= static_cast<double>(scores.size() - 1);
        csv << env_name << "," << preset << "," << policy_name << "," << seeds << "," << completed << ","
            << (scores.empty() ? std::string("nan") : format_score(mean)) << ","
            << format_score(std::sqrt(var)) << "\n";
        csv.flush();
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive physics-discovery episodes: simulators, harness and baselines"};
  app.require_subcommand(1);

  ConfigSource run_source;
  std::string run_agent = "grid", run_log;
  auto* run = app.add_subcommand("run", "Run one episode (or an ICL sequence)");
  run_source.add_options(*run);
  run->add_option("-a,--agent", run_agent, "random|grid|model_fit|const_accel|stdio")
      ->check(CLI::IsMember({"random", "grid", "model_fit", "const_accel", "stdio"}));
  run->add_option("-l,--log", run_log, "Append episode records to this JSONL file");

  ConfigSource serve_source;
  int serve_port = 0, serve_max = 0;
  std::string serve_socket, serve_log;
  auto* serve = app.add_subcommand("serve", "Accept agents over TCP or a Unix socket");
  serve_source.add_options(*serve);
  serve->add_option("--port", serve_port, "TCP port on 127.0.0.1 (0 picks a free one)");
  serve->add_option("--socket", serve_socket, "Unix socket path (instead of TCP)");
  serve->add_option("--max-connections", serve_max, "Exit after this many episodes (0 = run forever)");
  serve->add_option("-l,--log", serve_log, "Append episode records to this JSONL file");

  std::string replay_log;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run logged episodes and compare every response");
  replay_cmd->add_option("log", replay_log, "Episode log (JSONL)")->required();

  std::string render_log, render_out = "frames";
  int render_size = 512;
  auto* render = app.add_subcommand("render", "Write PNG frames of the true state at each observation");
  render->add_option("log", render_log, "Episode log (JSONL)")->required();
  render->add_option("-o,--out", render_out, "Output directory");
  render->add_option("--size", render_size, "Image side in pixels")->check(CLI::Range(16, 4096));

  std::vector<std::string> eval_envs{"classical", "fluid", "quantum"};
  std::vector<std::string> eval_policies{"random", "grid", "model_fit", "const_accel"};
  int eval_seeds = 3;
  std::string eval_scale = "quick", eval_csv, eval_log;
  auto* eval = app.add_subcommand("eval", "Baseline sweep over the built-in configurations (CSV)");
  eval->add_option("-e,--environments", eval_envs, "Environments to sweep");
  eval->add_option("--policies", eval_policies, "Baseline policies");
  eval->add_option("--seeds", eval_seeds, "Random initialisations per configuration")->check(CLI::PositiveNumber);
  eval->add_option("--scale", eval_scale, "Preset scale")->check(CLI::IsMember({"quick", "paper"}));
  eval->add_option("-o,--csv", eval_csv, "CSV output (stdout when omitted)");
  eval->add_option("-l,--log", eval_log, "Append episode records to this JSONL file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_source, run_agent, run_log);
    if (*serve) return cmd_serve(serve_source, serve_port, serve_socket, serve_max, serve_log);
    if (*replay_cmd) return cmd_replay(replay_log);
    if (*render) return cmd_render(render_log, render_out, render_size);
    if (*eval) return cmd_eval(eval_envs, eval_policies, eval_seeds, eval_scale, eval_csv, eval_log);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
