#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include <oevo/oevo.hpp>

namespace {

oevo::Engine::ResumeState capture_state(const oevo::Engine& eng) {
  oevo::Engine::ResumeState rs;
  rs.generation = eng.generation();
  rs.next_id = eng.next_id();
  rs.rng_state = eng.rng_state_text();
  rs.population = eng.population();
  rs.env = eng.env();
  rs.modal_series = eng.modal_series();
  rs.skipped_fusions = eng.skipped_fusions();
  rs.skipped_internal_births = eng.skipped_internal_births();
  return rs;
}

// Streams artifacts generation by generation, so a run halted at g and
// resumed in place appends to the same files byte for byte. The audit is
// always recomputed from the files on disk, never from memory, keeping it a
// pure function of the stored log.
oevo::RunStatus execute_run(const oevo::EngineConfig& cfg, const std::filesystem::path& dir,
                            std::optional<std::int64_t> halt_at,
                            const std::optional<oevo::SnapshotData>& snap) {
  oevo::Scenario scenario = oevo::make_scenario(cfg);
  const std::string digest = oevo::config_digest_hex(cfg);
  const bool resuming = snap.has_value();
  if (resuming && snap->config_digest != digest) {
    throw oevo::ConfigError("snapshot was taken under a different config");
  }

  std::optional<oevo::Engine> eng;
  if (resuming) eng.emplace(cfg, std::move(scenario), snap->state);
  else eng.emplace(cfg, std::move(scenario));

  oevo::RunWriter writer(dir, resuming);
  if (!resuming) writer.write_config(oevo::serialize_config(cfg));

  std::size_t next_event = 0;
  std::size_t next_row = 0;
  const auto flush = [&]() {
    while (next_event < eng->events().size()) writer.append_event(eng->events()[next_event++]);
    while (next_row < eng->rows().size()) writer.append_row(eng->rows()[next_row++]);
  };
  flush();  // generation-0 artifacts on a fresh run; nothing on resume

  while (!eng->finished()) {
    if (halt_at && eng->generation() >= *halt_at) {
      const oevo::Engine::ResumeState rs = capture_state(*eng);
      writer.write_snapshot(rs.generation, oevo::snapshot_text(rs, digest));
      writer.finalize();
      std::cout << "halted generation=" << rs.generation << " dir=" << dir.string() << "\n";
      return oevo::RunStatus::running;
    }
    eng->step();
    flush();
    if (cfg.output.snapshot_every > 0 && !eng->finished() &&
        eng->generation() % cfg.output.snapshot_every == 0) {
      const oevo::Engine::ResumeState rs = capture_state(*eng);
      writer.write_snapshot(rs.generation, oevo::snapshot_text(rs, digest));
    }
  }
  writer.finalize();

  const auto events = oevo::parse_events_text(oevo::read_file(dir / "events.jsonl"));
  const auto rows = oevo::parse_metrics_text(oevo::read_file(dir / "metrics.csv"));
  const oevo::AuditReport audit = oevo::condition_audit(events, rows, cfg.transition_window);
  writer.write_audit(oevo::audit_json_text(audit));

  oevo::RunInfo info;
  info.status = oevo::to_string(eng->status());
  info.final_generation = rows.empty() ? 0 : rows.back().generation;
  info.generations = cfg.generations;
  info.seed = cfg.seed;
  info.config_digest = digest;
  info.skipped_fusions = eng->skipped_fusions();
  info.skipped_internal_births = eng->skipped_internal_births();
  if (eng->status() == oevo::RunStatus::goal_reached) {
    info.goal_generation = info.final_generation;
  }
  writer.write_run_info(oevo::run_info_text(info));

  std::cout << "run status=" << oevo::to_string(eng->status())
            << " final_generation=" << info.final_generation << " dir=" << dir.string() << "\n";
  return eng->status();
}

std::filesystem::path resolve_out(const std::string& flag_value, const oevo::EngineConfig& cfg) {
  if (!flag_value.empty()) return flag_value;
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  throw oevo::ConfigError("no output directory: pass --out or set [output] directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recursive part-whole evolution simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_val = 0;
  std::int64_t halt_at = 0;
  std::string resume_path;
  std::uint64_t n_seeds = 0;
  std::string run_dir;
  std::vector<std::string> run_dirs;

  CLI::App* cmd_run = app.add_subcommand("run", "execute one run and write its artifacts");
  cmd_run->add_option("--config", config_path, "config file")->required();
  CLI::Option* seed_opt = cmd_run->add_option("--seed", seed_val, "override [engine] seed");
  cmd_run->add_option("--out", out_dir, "run directory (default: [output] directory)");
  CLI::Option* halt_opt =
      cmd_run->add_option("--halt-at", halt_at, "snapshot and stop at this generation");
  cmd_run->add_option("--resume", resume_path, "snapshot file to continue from");

  CLI::App* cmd_replicate = app.add_subcommand("replicate", "run consecutive seeds");
  cmd_replicate->add_option("--config", config_path, "config file")->required();
  cmd_replicate->add_option("--seeds", n_seeds, "number of consecutive seeds")->required();
  CLI::Option* rep_seed_opt = cmd_replicate->add_option("--seed", seed_val, "base seed override");
  cmd_replicate->add_option("--out", out_dir, "parent directory for the seed_<s> run dirs");

  CLI::App* cmd_audit = app.add_subcommand("audit", "recompute audit.json for a run directory");
  cmd_audit->add_option("--run", run_dir, "run directory")->required();

  CLI::App* cmd_report = app.add_subcommand("report", "aggregate statistics over run directories");
  cmd_report->add_option("--runs", run_dirs, "run directories")->required()->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      oevo::EngineConfig cfg = oevo::parse_config(oevo::read_file(config_path));
      if (seed_opt->count() > 0) cfg.seed = seed_val;
      const std::filesystem::path dir = resolve_out(out_dir, cfg);
      std::optional<oevo::SnapshotData> snap;
      if (!resume_path.empty()) {
        snap = oevo::parse_snapshot_text(oevo::read_file(resume_path));
      }
      std::optional<std::int64_t> halt;
      if (halt_opt->count() > 0) halt = halt_at;
      execute_run(cfg, dir, halt, snap);
      return 0;
    }
    if (cmd_replicate->parsed()) {
      oevo::EngineConfig base = oevo::parse_config(oevo::read_file(config_path));
      if (rep_seed_opt->count() > 0) base.seed = seed_val;
      const std::filesystem::path dir = resolve_out(out_dir, base);
      std::uint64_t completed = 0;
      std::uint64_t extinct = 0;
      std::uint64_t goal = 0;
      for (std::uint64_t i = 0; i < n_seeds; ++i) {
        oevo::EngineConfig cfg = base;
        cfg.seed = base.seed + i;
        const oevo::RunStatus st =
            execute_run(cfg, dir / ("seed_" + std::to_string(cfg.seed)), std::nullopt, std::nullopt);
        if (st == oevo::RunStatus::extinct) ++extinct;
        else if (st == oevo::RunStatus::goal_reached) ++goal;
        else ++completed;
      }
      std::cout << "replicate seeds=" << n_seeds << " completed=" << completed
                << " extinct=" << extinct << " goal=" << goal << " dir=" << dir.string() << "\n";
      return 0;
    }
    if (cmd_audit->parsed()) {
      const std::filesystem::path dir = run_dir;
      const oevo::EngineConfig cfg = oevo::parse_config(oevo::read_file(dir / "config.ini"));
      const auto events = oevo::parse_events_text(oevo::read_file(dir / "events.jsonl"));
      const auto rows = oevo::parse_metrics_text(oevo::read_file(dir / "metrics.csv"));
      const std::string text =
          oevo::audit_json_text(oevo::condition_audit(events, rows, cfg.transition_window));
      oevo::write_file(dir / "audit.json", text);
      std::cout << text;
      return 0;
    }
    std::vector<oevo::RunSummary> summaries;
    summaries.reserve(run_dirs.size());
    for (const std::string& d : run_dirs) summaries.push_back(oevo::load_run_summary(d));
    std::cout << oevo::render_report(summaries);
    return 0;
  } catch (const oevo::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const oevo::IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
