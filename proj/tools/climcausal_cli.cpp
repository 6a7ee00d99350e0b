#include "climcausal/error.hpp"
#include "climcausal/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace climcausal;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Data, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Config, "cannot write " + path.string());
  out << text;
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

// Order files hold one label per line, sources first.
TopologicalOrder read_order(const std::filesystem::path& path, const SampleMatrix& samples) {
  std::istringstream in(read_text(path));
  TopologicalOrder order;
  order.labels = samples.labels;
  order.rows_used = samples.rows();
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto c = samples.column(line);
    if (!c) fail(ErrorKind::Data, "order names unknown column " + line);
    order.order.push_back(*c);
  }
  order.validate();
  return order;
}

struct Options {
  PipelineConfig cfg;
  std::string wdi, emissions, out, samples, order_path, truth, estimate, manifest;
  std::vector<std::string> indicators, categories = {"Direct", "Preventative", "Facilitative", "Resultative", "Influential"},
                                       styles = {"zero-shot", "few-shot", "chain-of-thought"}, drivers;
  std::string impute = "interpolate", method = "pearson";
  std::vector<std::string> family = {"tanh-mix", "quadratic", "sine"};
  bool live = false, live_literature = false, no_queries = false, no_literature = false;
  std::size_t d = 5, n = 1000;
  double edge_prob = 0.4;
};

void add_ingest_flags(CLI::App* app, Options& o) {
  app->add_option("--wdi", o.wdi, "WDI wide CSV");
  app->add_option("--emissions", o.emissions, "emissions CSV (long or wide)");
  app->add_option("--indicators", o.indicators, "indicator whitelist");
  app->add_option("--year-from", o.cfg.ingest.year_from);
  app->add_option("--year-to", o.cfg.ingest.year_to);
  app->add_option("--max-indicator-missing", o.cfg.ingest.max_indicator_missing);
  app->add_option("--max-row-missing", o.cfg.ingest.max_row_missing);
  app->add_option("--impute", o.impute, "interpolate | median | drop-rows");
  app->add_option("--target", o.cfg.ingest.target_label);
}

void add_synth_flags(CLI::App* app, Options& o) {
  app->add_option("--d", o.d, "number of variables");
  app->add_option("--edge-prob", o.edge_prob);
  app->add_option("--n", o.n, "number of samples");
  app->add_option("--family", o.family, "mechanism tags");
}

void add_screen_flags(CLI::App* app, Options& o) {
  app->add_option("--method", o.method, "pearson | spearman");
  app->add_option("--tau-target", o.cfg.tau_target);
  app->add_option("--tau-dup", o.cfg.tau_dup);
}

void add_order_flags(CLI::App* app, Options& o) {
  app->add_option("--ridge", o.cfg.ridge);
  app->add_option("--subsample-cap", o.cfg.subsample_cap);
}

void add_prune_flags(CLI::App* app, Options& o) {
  app->add_option("--alpha", o.cfg.alpha);
  app->add_option("--basis-size", o.cfg.basis_size);
}

void add_query_flags(CLI::App* app, Options& o) {
  app->add_option("--categories", o.categories);
  app->add_option("--styles", o.styles);
  app->add_flag("--live", o.live, "send prompts to the configured chat endpoint");
  app->add_flag("--live-literature", o.live_literature, "query Entrez instead of the bundled fixture");
  app->add_option("--llm-endpoint", o.cfg.llm.endpoint);
  app->add_option("--llm-model", o.cfg.llm.model);
  app->add_option("--llm-token-env", o.cfg.llm.token_env);
  app->add_option("--llm-timeout", o.cfg.llm.timeout_s);
  app->add_option("--llm-retries", o.cfg.llm.max_retries);
  app->add_flag("--no-literature", o.no_literature);
}

void finish(Options& o) {
  o.cfg.ingest.impute = parse_impute_mode(o.impute);
  o.cfg.screen_method = parse_correlation_method(o.method);
  o.cfg.categories.clear();
  for (const auto& c : o.categories) o.cfg.categories.insert(parse_category(c));
  o.cfg.styles.clear();
  for (const auto& s : o.styles) o.cfg.styles.insert(parse_style(s));
  o.cfg.llm.stub = !o.live;
  o.cfg.literature_cfg.stub = !o.live_literature;
  o.cfg.literature = !o.no_literature;
  o.cfg.queries = !o.no_queries;
}

SyntheticSpec synth_spec(const Options& o) {
  SyntheticSpec s{o.d, o.edge_prob, o.n, {}};
  for (const auto& f : o.family) s.family.insert(parse_mechanism(f));
  return s;
}

void print_screen(const ScreenReport& r) {
  std::cout << "kept:";
  for (const auto& k : r.kept) std::cout << ' ' << k;
  std::cout << '\n';
  for (const auto& d : r.dropped) std::cout << "dropped: " << d.label << " (" << d.reason << ")\n";
  for (const auto& f : r.flagged) std::cout << "flagged: " << f.label << " (near-duplicate of " << f.twin << ")\n";
}

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"climcausal: correlation screening, score-based causal discovery and prompt generation"};
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(0, 1);
  app.fallthrough();
  bool explain = false;
  app.add_flag("--explain-config", explain, "print every default and exit");
  app.add_option("--seed", o.cfg.seed, "master seed (overrides the config file)");
  app.add_option("--threads", o.cfg.threads, "worker threads");

  auto* ingest = app.add_subcommand("ingest", "WDI + emissions CSV -> standardized sample CSV");
  add_ingest_flags(ingest, o);
  ingest->add_option("--out", o.out, "sample CSV")->required();
  ingest->add_flag("--raw", [&](std::int64_t) { o.cfg.ingest.standardize = false; }, "skip standardization");

  auto* screen = app.add_subcommand("screen", "correlation screening of a sample CSV");
  screen->add_option("--samples", o.samples)->required();
  screen->add_option("--target", o.cfg.ingest.target_label);
  add_screen_flags(screen, o);
  screen->add_option("--out", o.out, "screened sample CSV");

  auto* discover = app.add_subcommand("discover", "estimate a topological order");
  discover->add_option("--samples", o.samples)->required();
  add_order_flags(discover, o);
  discover->add_option("--out", o.out, "order file (one label per line)");

  auto* prune = app.add_subcommand("prune", "prune the order-implied graph");
  prune->add_option("--samples", o.samples)->required();
  prune->add_option("--order", o.order_path)->required();
  add_prune_flags(prune, o);
  prune->add_option("--out", o.out, "edge-list CSV");
  prune->add_option("--dot", o.estimate, "DOT output");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "compare an estimated graph with the truth");
  evaluate_cmd->add_option("--truth", o.truth)->required();
  evaluate_cmd->add_option("--estimate", o.estimate)->required();

  auto* query = app.add_subcommand("query", "render (and optionally send) causal prompts");
  query->add_option("--drivers", o.drivers, "indicator codes")->required();
  query->add_option("--target", o.cfg.ingest.target_label);
  add_query_flags(query, o);
  query->add_option("--out", o.out, "prompt archive directory");

  auto* synth = app.add_subcommand("synth", "sample a random additive-noise SEM");
  add_synth_flags(synth, o);
  synth->add_option("--out", o.out, "sample CSV")->required();
  synth->add_option("--truth", o.truth, "true graph edge list");
  synth->add_option("--manifest", o.manifest, "SEM manifest");

  auto* run_cmd = app.add_subcommand("run", "full pipeline");
  add_ingest_flags(run_cmd, o);
  bool synthetic = false;
  run_cmd->add_flag("--synthetic", synthetic, "use a synthetic SEM instead of WDI inputs");
  add_synth_flags(run_cmd, o);
  add_screen_flags(run_cmd, o);
  add_order_flags(run_cmd, o);
  add_prune_flags(run_cmd, o);
  add_query_flags(run_cmd, o);
  run_cmd->add_flag("--no-queries", o.no_queries);
  run_cmd->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ErrorKind::Config);
  }

  finish(o);
  if (explain) {
    std::cout << explain_config(o.cfg);
    std::cout << "threads = " << o.cfg.threads << '\n';
    return 0;
  }

  if (*ingest) {
    const IndicatorPanel panel =
        load_wdi(o.wdi, o.indicators.empty() ? std::nullopt : std::optional(as_set(o.indicators)));
    const AssembleResult r = assemble_samples(panel, load_emissions(o.emissions), o.cfg.ingest);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    write_samples_csv(r.samples, o.out);
    std::cout << r.samples.rows() << " rows x " << r.samples.cols() << " columns -> " << o.out << '\n';
  } else if (*screen) {
    const SampleMatrix s = read_samples_csv(o.samples);
    const ScreenReport r =
        screen_variables(correlation_matrix(s, o.cfg.screen_method), o.cfg.ingest.target_label, o.cfg.tau_target,
                         o.cfg.tau_dup);
    print_screen(r);
    if (!o.out.empty()) {
      std::vector<std::size_t> keep;
      for (const auto& k : r.kept) keep.push_back(*s.column(k));
      write_samples_csv(s.select_columns(keep), o.out);
    }
  } else if (*discover) {
    const SampleMatrix s = read_samples_csv(o.samples);
    const TopologicalOrder order = estimate_order(s, {o.cfg.ridge, o.cfg.subsample_cap, o.cfg.seed, o.cfg.threads});
    std::string text;
    for (const auto& l : order.ordered_labels()) text += l + "\n";
    write_text(o.out, text);
  } else if (*prune) {
    const SampleMatrix s = read_samples_csv(o.samples);
    const TopologicalOrder order = read_order(o.order_path, s);
    const PruneResult r = prune_edges(s, order, {o.cfg.alpha, o.cfg.basis_size, o.cfg.threads});
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    write_text(o.out, format_graph(r.graph, GraphFormat::EdgeList));
    if (!o.estimate.empty()) export_graph(r.graph, GraphFormat::Dot, o.estimate);
  } else if (*evaluate_cmd) {
    const CausalGraph truth = read_edgelist(o.truth);
    const CausalGraph estimate = read_edgelist(o.estimate, truth.labels());
    const MetricsReport m = evaluate(truth, estimate);
    std::cout << "shd = " << m.shd << "\nsid = " << m.sid << "\nprecision = " << m.precision
              << "\nrecall = " << m.recall << "\nf1 = " << m.f1 << "\nl2 = " << m.l2 << '\n';
  } else if (*query) {
    std::vector<Driver> drivers;
    for (const auto& code : o.drivers) drivers.push_back({code, indicator_name(code)});
    LlmClient llm;
    llm.config = o.cfg.llm;
    llm.log = [](const std::string& line) { std::cerr << line << '\n'; };
    if (!o.out.empty()) std::filesystem::create_directories(o.out);
    const auto queries = build_queries(drivers, o.cfg.ingest.target_label, o.cfg.categories, o.cfg.styles);
    for (const auto& q : queries) {
      const LlmResponse r = ask_llm(q.prompt_text, llm);
      if (o.out.empty()) {
        std::cout << "== " << q.archive_name() << "\n" << q.prompt_text << "-- " << r.text << "\n";
      } else {
        write_text(std::filesystem::path(o.out) / q.archive_name(), q.prompt_text + "\n--- response ---\n" + r.text + "\n");
      }
    }
    std::cout << queries.size() << " prompts\n";
  } else if (*synth) {
    const SyntheticSpec spec = synth_spec(o);
    const CausalGraph dag = sample_dag(spec.d, spec.edge_prob, o.cfg.seed);
    const SemModel model = sample_mechanisms(dag, spec.family, o.cfg.seed + 1);
    write_samples_csv(sample_data(model, spec.n, o.cfg.seed + 2), o.out);
    if (!o.truth.empty()) export_graph(dag, GraphFormat::EdgeList, o.truth);
    if (!o.manifest.empty()) write_text(o.manifest, write_manifest(model));
  } else if (*run_cmd) {
    if (synthetic) o.cfg.synthetic = synth_spec(o);
    if (!o.wdi.empty() || !o.emissions.empty())
      o.cfg.real = RealInputs{o.wdi, o.emissions,
                              o.indicators.empty() ? std::nullopt : std::optional(as_set(o.indicators))};
    o.cfg.output_dir = o.out;
    const PipelineReport report = run_pipeline(o.cfg);
    if (o.out.empty()) std::cout << report.text();
    else
      std::cout << "report written to " << (std::filesystem::path(o.out) / "report.txt").string()
                << "\ndeterminism_hash = " << report.determinism_hash() << '\n';
  } else {
    std::cout << app.help();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(ErrorKind::Config);
  }
}
