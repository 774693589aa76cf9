#include "stylevis/cli.hpp"

#include "stylevis/error.hpp"
#include "stylevis/manifest.hpp"
#include "stylevis/pipeline.hpp"
#include "stylevis/study_design.hpp"
#include "stylevis/survey_http.hpp"
#include "stylevis/text.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>

namespace stylevis::cli {
namespace {

namespace fs = std::filesystem;

survey::SurveyHttpServer* g_server = nullptr;

extern "C" void handle_stop(int) {
  if (g_server) g_server->stop();
}

pipeline::StageResult run_serve(const pipeline::PipelineConfig& config,
                                const pipeline::RunFlags& flags, std::ostream& out) {
  const auto& root = config.output_root;
  if (!fs::exists(root / pipeline::layout::kPlan)) {
    throw Error(ErrorKind::StagedDependency,
                "missing " + (root / pipeline::layout::kPlan).string() + " (run `assign` first)");
  }
  if (!fs::exists(root / pipeline::layout::kManifest)) {
    throw Error(ErrorKind::StagedDependency, "missing " +
                                                 (root / pipeline::layout::kManifest).string() +
                                                 " (run `images` first)");
  }
  auto plan = study::plan_from_json(fsutil::read_file(root / pipeline::layout::kPlan));
  auto narratives = pipeline::load_cleaned_narratives(root);
  auto artifacts = images::read_manifest(root / pipeline::layout::kManifest);

  const char* token = std::getenv(config.serve.admin_token_env.c_str());
  if (!token || !*token) {
    throw Error(ErrorKind::Config,
                "admin token variable " + config.serve.admin_token_env + " is not set");
  }
  if (flags.dry_run) {
    return {0, "serve: " + std::to_string(plan.per_rater.size()) + " raters ready (dry run)"};
  }

  survey::ResponseStore store(root / pipeline::layout::kJournal);
  survey::SurveyService service(std::move(plan), std::move(narratives), std::move(artifacts),
                                root, store);
  survey::SurveyHttpServer server(service, token);
  if (!config.serve.ui_dir.empty()) server.mount_static(config.serve.ui_dir);
  if (!server.bind(config.serve.host, config.serve.port)) {
    return {1, "serve: cannot bind " + config.serve.host + ":" + std::to_string(config.serve.port)};
  }
  out << "serving on http://" << config.serve.host << ":" << config.serve.port << "\n";
  g_server = &server;
  std::signal(SIGINT, handle_stop);
  std::signal(SIGTERM, handle_stop);
  server.listen_after_bind();
  g_server = nullptr;
  return {0, "serve: stopped with " + std::to_string(store.size()) + " responses stored"};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Author style sheet to image pipeline and rater study toolkit", "stylevis"};
  app.require_subcommand(1);

  std::string config_path;
  pipeline::RunFlags flags;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string corpus_dir;
  std::string report_input;
  std::string host;
  int port = 0;

  app.add_option("--config", config_path, "Pipeline config file (JSON)");
  app.add_flag("--mock", flags.mock, "Use deterministic mock providers");
  app.add_flag("--dry-run", flags.dry_run, "Validate inputs without provider calls or writes");
  auto* seed_opt = app.add_option("--seed", seed, "Override corpus and study seeds");
  app.add_option("--parallel", flags.parallel, "Concurrent provider calls")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output root directory");
  app.add_option("--corpus", corpus_dir, "Directory of raw author sheets");

  const std::vector<std::pair<const char*, const char*>> subcommands = {
      {"ingest", "Parse and clean author sheets"},
      {"prompts", "Synthesize prompt triples with the LLM provider"},
      {"images", "Render images for every prompt triple"},
      {"assign", "Build the rater assignment plan"},
      {"serve", "Run the survey HTTP service"},
      {"export", "Export stored responses to CSV"},
      {"report", "Compute evaluation metrics from the response CSV"},
      {"all", "ingest, prompts, images and assign in sequence"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    subs[name] = sub;
  }
  subs["report"]->add_option("--input", report_input, "Response CSV (default: <out>/responses.csv)");
  subs["serve"]->add_option("--host", host, "Bind address");
  subs["serve"]->add_option("--port", port, "Bind port");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (seed_opt->count()) flags.seed = seed;
  if (!out_dir.empty()) flags.out = fs::path(out_dir);
  if (!corpus_dir.empty()) flags.corpus = fs::path(corpus_dir);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto config = config_path.empty() ? pipeline::PipelineConfig::from_json("{}", {})
                                      : pipeline::PipelineConfig::load(config_path);
    config = pipeline::apply_flags(std::move(config), flags);
    if (!host.empty()) config.serve.host = host;
    if (port) config.serve.port = port;

    pipeline::StageResult result;
    if (command == "ingest") {
      result = pipeline::run_ingest(config, flags, err);
    } else if (command == "prompts") {
      auto provider = pipeline::make_llm_provider(config, flags.mock);
      result = pipeline::run_prompts(config, flags, *provider, err);
    } else if (command == "images") {
      auto provider = pipeline::make_image_provider(config, flags.mock);
      result = pipeline::run_images(config, flags, *provider, err);
    } else if (command == "assign") {
      result = pipeline::run_assign(config, flags, out);
    } else if (command == "serve") {
      result = run_serve(config, flags, out);
    } else if (command == "export") {
      result = pipeline::run_export(config, flags, err);
    } else if (command == "report") {
      std::optional<fs::path> input;
      if (!report_input.empty()) input = fs::path(report_input);
      result = pipeline::run_report(config, flags, input, out);
    } else {
      auto llm_provider = pipeline::make_llm_provider(config, flags.mock);
      auto image_provider = pipeline::make_image_provider(config, flags.mock);
      result = pipeline::run_all(config, flags, *llm_provider, *image_provider, err);
    }
    out << result.summary << "\n";
    return result.exit_code == 0 ? kExitOk : kExitStageFailure;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? kExitConfigError : kExitStageFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitStageFailure;
  }
}

}  // namespace stylevis::cli
