#include "passtopic/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "passtopic/error.hpp"
#include "passtopic/match_io.hpp"
#include "passtopic/model_io.hpp"
#include "passtopic/report.hpp"
#include "passtopic/seqmine.hpp"
#include "passtopic/service.hpp"

namespace passtopic {

namespace fs = std::filesystem;

namespace {

struct CliConfig {
  std::string input;
  std::string output;
  std::string output_dir;
  std::string model;
  std::string team;
  int k = 5;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iters = 500;
  double theta = kDefaultKeyThreshold;
  std::string count_mode = "binary";
  std::string word_mode = "player";
  std::string sequence_mode = "player";
  std::string sort = "frequency";
  std::string format = "tsv";
  int min_support = 2;
  int max_len = 5;
  bool heuristic_styles = false;

  ServiceConfig serve;
  std::string data_dir = "passtopic-data";
  long long timeout_s = 60;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string(), "output");
}

void check_output_file(const std::string& path) {
  if (path.empty() || path == "-") return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw UsageError("output directory does not exist: " + parent.string());
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file(path, content);
  }
}

// Loads, normalizes for the analysed team, and segments.
MatchRecord load_view(const CliConfig& cfg, TeamId& team) {
  MatchRecord match = parse_match(read_file(cfg.input));
  team = cfg.team.empty() ? match.teams[0].id : cfg.team;
  match.team(team);  // unknown team -> domain error
  MatchRecord view = normalize_direction(std::move(match), team);
  segment(view, SegmentOptions{cfg.heuristic_styles});
  return view;
}

DetectConfig detect_config(const CliConfig& cfg) {
  DetectConfig d;
  d.nmf.seed = cfg.seed;
  d.nmf.tol = cfg.tol;
  d.nmf.max_iters = cfg.max_iters;
  d.theta = cfg.theta;
  d.count_mode = *parse_count_mode(cfg.count_mode);
  d.word_mode = *parse_word_mode(cfg.word_mode);
  return d;
}

void add_detect_options(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--team", cfg.team, "Team to analyse (default: first team in the file)");
  cmd->add_option("--k", cfg.k, "Number of build-up patterns")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "Initialization seed");
  cmd->add_option("--tol", cfg.tol, "Relative objective decrease that stops the fit")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-iters", cfg.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--theta", cfg.theta, "Key-player threshold relative to the topic maximum")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--mode", cfg.count_mode, "Document vectors")->check(CLI::IsMember({"binary", "count"}));
  cmd->add_option("--words", cfg.word_mode, "Dictionary words")->check(CLI::IsMember({"player", "region"}));
  cmd->add_flag("--heuristic-styles", cfg.heuristic_styles, "Label unlabeled phases with the counter-attack heuristic");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Passing-pattern analytics for soccer match data", "passtopic"};
  app.require_subcommand(1, 1);
  CliConfig cfg;

  auto* ingest = app.add_subcommand("ingest", "Validate a match file and write its normalized form");
  ingest->add_option("--input,-i", cfg.input, "Match file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--output,-o", cfg.output, "Normalized match file (default: stdout)");
  ingest->add_option("--team", cfg.team, "Team whose attack is normalized to +x (default: first team)");
  ingest->add_flag("--heuristic-styles", cfg.heuristic_styles, "Label unlabeled phases with the counter-attack heuristic");

  auto* detect = app.add_subcommand("detect", "Fit passing patterns and write the model export");
  detect->add_option("--input,-i", cfg.input, "Match file")->required()->check(CLI::ExistingFile);
  detect->add_option("--output,-o", cfg.output, "Model export (default: stdout)");
  add_detect_options(detect, cfg);

  auto* mine = app.add_subcommand("mine", "Mine frequent sequential passing patterns");
  mine->add_option("--input,-i", cfg.input, "Match file")->required()->check(CLI::ExistingFile);
  mine->add_option("--output,-o", cfg.output, "Pattern table (default: stdout)");
  mine->add_option("--team", cfg.team, "Team to analyse (default: first team in the file)");
  mine->add_option("--min-support", cfg.min_support, "Minimum number of phases")->check(CLI::PositiveNumber);
  mine->add_option("--max-len", cfg.max_len, "Longest pattern")->check(CLI::PositiveNumber);
  mine->add_option("--mode", cfg.sequence_mode, "Tokens")->check(CLI::IsMember({"player", "role"}));
  mine->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"tsv", "json"}));
  mine->add_flag("--heuristic-styles", cfg.heuristic_styles, "Label unlabeled phases with the counter-attack heuristic");

  auto* exp = app.add_subcommand("export", "Write flow, pattern and metric tables");
  exp->add_option("--input,-i", cfg.input, "Match file")->required()->check(CLI::ExistingFile);
  exp->add_option("--output-dir,-o", cfg.output_dir, "Directory for the tables")->required()->check(CLI::ExistingDirectory);
  exp->add_option("--model", cfg.model, "Model export to reuse instead of fitting")->check(CLI::ExistingFile);
  exp->add_option("--sort", cfg.sort, "Pattern ranking")->check(CLI::IsMember({"frequency", "shootings"}));
  add_detect_options(exp, cfg);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", cfg.serve.host, "Listen address");
  serve->add_option("--port", cfg.serve.port, "Listen port")->envname("PASSTOPIC_PORT")->check(CLI::Range(1, 65535));
  serve->add_option("--data-dir", cfg.data_dir, "Storage directory")->envname("PASSTOPIC_DATA_DIR");
  serve->add_option("--default-k", cfg.serve.default_k, "k when a request omits it")
      ->envname("PASSTOPIC_DEFAULT_K")
      ->check(CLI::PositiveNumber);
  serve->add_option("--default-seed", cfg.serve.default_seed, "Seed when a request omits it")
      ->envname("PASSTOPIC_DEFAULT_SEED");
  serve->add_option("--timeout", cfg.timeout_s, "Detection time budget in seconds")->check(CLI::PositiveNumber);
  serve->add_flag("--heuristic-styles", cfg.serve.heuristic_styles,
                  "Label unlabeled phases with the counter-attack heuristic");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "passtopic: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ingest) {
      check_output_file(cfg.output);
      MatchRecord match = parse_match(read_file(cfg.input));
      if (!cfg.team.empty()) {
        match.team(cfg.team);
        match = normalize_direction(std::move(match), cfg.team);
      }
      const auto phases = segment_phases(match, SegmentOptions{cfg.heuristic_styles});
      emit(cfg.output, match_to_json(match).dump(2) + "\n", out);
      if (!cfg.output.empty() && cfg.output != "-") {
        out << match.match_id << ": " << match.passes().size() << " passes, " << phases.size() << " phases\n";
      }
    } else if (*detect) {
      check_output_file(cfg.output);
      TeamId team;
      const MatchRecord view = load_view(cfg, team);
      emit(cfg.output, export_model(detect_patterns(view, team, cfg.k, detect_config(cfg))), out);
    } else if (*mine) {
      check_output_file(cfg.output);
      TeamId team;
      const MatchRecord view = load_view(cfg, team);
      const SequenceMode mode = cfg.sequence_mode == "role" ? SequenceMode::role : SequenceMode::player;
      const auto corpus = mining_corpus(view, team, mode);
      const auto patterns = prefixspan(corpus.sequences, cfg.min_support, cfg.max_len);
      if (cfg.format == "tsv") {
        emit(cfg.output, patterns_to_tsv(patterns, corpus.labels), out);
      } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& p : patterns) {
          nlohmann::json labels = nlohmann::json::array();
          for (int t : p.tokens) labels.push_back(corpus.labels.at(static_cast<std::size_t>(t)));
          rows.push_back({{"tokens", labels}, {"support", p.support}, {"length", p.tokens.size()}});
        }
        emit(cfg.output, rows.dump(2) + "\n", out);
      }
    } else if (*exp) {
      TeamId team;
      const MatchRecord view = load_view(cfg, team);
      Detection d = cfg.model.empty() ? detect_patterns(view, team, cfg.k, detect_config(cfg))
                                      : import_model(read_file(cfg.model));
      if (d.team != team) {
        throw Error(ErrorCode::invalid_argument, "model was fitted for team '" + d.team + "'", "team");
      }
      const auto flow = flow_view(view, d);
      const auto patterns = patterns_view(view, d, *parse_pattern_sort(cfg.sort));
      const fs::path dir = cfg.output_dir;
      write_file(dir / "model.json", export_model(d));
      write_file(dir / "flow.json", flow.dump(2) + "\n");
      write_file(dir / "patterns.json", patterns.dump(2) + "\n");
      write_file(dir / "flow.tsv", flow_tsv(flow));
      write_file(dir / "patterns.tsv", patterns_tsv(patterns));
      write_file(dir / "metrics.tsv", metrics_tsv(flow));
    } else if (*serve) {
      cfg.serve.data_dir = cfg.data_dir;
      cfg.serve.detect_timeout = std::chrono::seconds(cfg.timeout_s);
      return run_server(cfg.serve) == 0 ? kExitOk : kExitDomain;
    }
  } catch (const UsageError& e) {
    err << "passtopic: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "passtopic: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "passtopic: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace passtopic
