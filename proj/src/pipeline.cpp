#include "climcausal/pipeline.hpp"

#include "climcausal/error.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace climcausal {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items, const char* sep = " ") {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

template <class Set, class F>
std::string join_set(const Set& items, F&& name) {
  std::vector<std::string> v;
  for (const auto& x : items) v.push_back(name(x));
  return join(v, ",");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Config, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Config, "write failed for " + path.string());
}

}  // namespace

void PipelineConfig::validate() const {
  if (real.has_value() == synthetic.has_value())
    fail(ErrorKind::Config, "exactly one of real-data inputs or a synthetic spec must be given");
  if (synthetic) {
    if (synthetic->d < 2) fail(ErrorKind::Config, "synthetic d must be at least 2");
    if (!(synthetic->edge_prob >= 0.0 && synthetic->edge_prob <= 1.0))
      fail(ErrorKind::Config, "synthetic edge_prob must lie in [0, 1]");
    if (synthetic->n < 2) fail(ErrorKind::Config, "synthetic n must be at least 2");
    if (synthetic->family.empty()) fail(ErrorKind::Config, "synthetic mechanism family must not be empty");
  }
  if (real && (real->wdi.empty() || real->emissions.empty()))
    fail(ErrorKind::Config, "real-data runs need both a WDI and an emissions path");
  if (ingest.year_from > ingest.year_to) fail(ErrorKind::Config, "year_from must not exceed year_to");
  if (!(ingest.max_indicator_missing >= 0.0 && ingest.max_indicator_missing <= 1.0))
    fail(ErrorKind::Config, "max_indicator_missing must lie in [0, 1]");
  if (!(ingest.max_row_missing >= 0.0 && ingest.max_row_missing <= 1.0))
    fail(ErrorKind::Config, "max_row_missing must lie in [0, 1]");
  if (!(tau_target >= 0.0 && tau_target <= 1.0)) fail(ErrorKind::Config, "tau_target must lie in [0, 1]");
  if (!(tau_dup > 0.0 && tau_dup <= 1.0)) fail(ErrorKind::Config, "tau_dup must lie in (0, 1]");
  if (!(ridge > 0.0)) fail(ErrorKind::Config, "ridge must be positive");
  if (subsample_cap < 2) fail(ErrorKind::Config, "subsample_cap must be at least 2");
  PruneConfig{alpha, basis_size, threads}.validate();
  if (threads < 1) fail(ErrorKind::Config, "threads must be at least 1");
  if (queries && (categories.empty() || styles.empty()))
    fail(ErrorKind::Config, "query stage needs at least one category and one style");
}

std::string explain_config(const PipelineConfig& cfg) {
  std::ostringstream os;
  os << "mode = " << (cfg.synthetic ? "synthetic" : cfg.real ? "real" : "unset") << '\n';
  if (cfg.real) {
    os << "wdi = " << cfg.real->wdi.string() << '\n';
    os << "emissions = " << cfg.real->emissions.string() << '\n';
    os << "indicators = "
       << (cfg.real->indicator_whitelist ? join_set(*cfg.real->indicator_whitelist, [](auto& s) { return s; })
                                         : std::string("all"))
       << '\n';
  }
  const SyntheticSpec syn = cfg.synthetic.value_or(SyntheticSpec{});
  os << "synthetic.d = " << syn.d << '\n';
  os << "synthetic.edge_prob = " << num(syn.edge_prob) << '\n';
  os << "synthetic.n = " << syn.n << '\n';
  os << "synthetic.family = " << join_set(syn.family, [](Mechanism m) { return to_string(m); }) << '\n';
  os << "year_from = " << cfg.ingest.year_from << '\n';
  os << "year_to = " << cfg.ingest.year_to << '\n';
  os << "max_indicator_missing = " << num(cfg.ingest.max_indicator_missing) << '\n';
  os << "max_row_missing = " << num(cfg.ingest.max_row_missing) << '\n';
  os << "impute = " << to_string(cfg.ingest.impute) << '\n';
  os << "standardize = " << (cfg.ingest.standardize ? "true" : "false") << '\n';
  os << "target = " << cfg.ingest.target_label << '\n';
  os << "screen_method = " << to_string(cfg.screen_method) << '\n';
  os << "tau_target = " << num(cfg.tau_target) << '\n';
  os << "tau_dup = " << num(cfg.tau_dup) << '\n';
  os << "ridge = " << num(cfg.ridge) << '\n';
  os << "subsample_cap = " << cfg.subsample_cap << '\n';
  os << "alpha = " << num(cfg.alpha) << '\n';
  os << "basis_size = " << cfg.basis_size << '\n';
  os << "queries = " << (cfg.queries ? "true" : "false") << '\n';
  os << "categories = " << join_set(cfg.categories, [](QueryCategory c) { return to_string(c); }) << '\n';
  os << "styles = " << join_set(cfg.styles, [](PromptStyle s) { return to_string(s); }) << '\n';
  os << "llm.stub = " << (cfg.llm.stub ? "true" : "false") << '\n';
  os << "llm.endpoint = " << cfg.llm.endpoint << '\n';
  os << "llm.model = " << cfg.llm.model << '\n';
  os << "llm.token_env = " << cfg.llm.token_env << '\n';
  os << "llm.timeout_s = " << num(cfg.llm.timeout_s) << '\n';
  os << "llm.max_retries = " << cfg.llm.max_retries << '\n';
  os << "literature = " << (cfg.literature ? "true" : "false") << '\n';
  os << "literature.stub = " << (cfg.literature_cfg.stub ? "true" : "false") << '\n';
  os << "seed = " << cfg.seed << '\n';
  return os.str();
}

std::vector<RankedDriver> rank_drivers(const PruneResult& prune, const std::string& target) {
  const auto t = prune.graph.index_of(target);
  if (!t) return {};
  std::vector<RankedDriver> out;
  for (std::size_t p : prune.graph.parents(*t)) {
    const EdgeTest* test = prune.test(p, *t);
    RankedDriver d{prune.graph.labels()[p], 1.0, 0.0};
    if (test) {
      d.p_value = test->p_value;
      d.f_statistic = test->f_statistic;
    }
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const RankedDriver& a, const RankedDriver& b) {
    if (a.p_value != b.p_value) return a.p_value < b.p_value;
    return a.label < b.label;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Report

std::string PipelineReport::deterministic_text() const {
  std::ostringstream os;
  os << "# climcausal pipeline report\n";
  os << "status: " << (complete ? "complete" : "incomplete") << '\n';
  if (!complete) os << "failed_stage: " << failed_stage << '\n' << "failure: " << failure << '\n';

  os << "\n[config]\n" << config_echo;

  os << "\n[data]\n";
  if (samples.data.size() == 0) {
    os << "skipped: not reached\n";
  } else {
    os << "rows = " << samples.rows() << '\n';
    os << "columns = " << samples.cols() << '\n';
    os << "target = " << target << '\n';
    os << "labels = " << join(samples.labels) << '\n';
    for (const auto& d : dropped_indicators) os << "dropped_indicator = " << d << '\n';
  }

  os << "\n[screen]\n";
  if (!screen) {
    os << "skipped: not reached\n";
  } else {
    os << "applied = " << (screen_applied ? "true" : "false (synthetic run: ground truth covers every node)") << '\n';
    os << "kept = " << join(screen->kept) << '\n';
    for (const auto& d : screen->dropped) os << "dropped = " << d.label << " (" << d.reason << ")\n";
    for (const auto& f : screen->flagged) os << "flagged = " << f.label << " (near-duplicate of " << f.twin << ")\n";
  }

  os << "\n[order]\n";
  if (!order) {
    os << "skipped: not reached\n";
  } else {
    os << "order = " << join(order->ordered_labels()) << '\n';
    os << "rows_used = " << order->rows_used << (order->subsampled ? " (subsampled)" : "") << '\n';
    for (std::size_t r = 0; r < order->trace.size(); ++r) {
      const auto& round = order->trace[r];
      os << "round " << r + 1 << ": leaf = " << order->labels[round.chosen] << ", bandwidth = " << num(round.bandwidth)
         << ", variances =";
      for (Eigen::Index k = 0; k < round.variances.size(); ++k)
        os << ' ' << round.remaining[static_cast<std::size_t>(k)] << ':' << num(round.variances[k]);
      os << '\n';
    }
  }

  os << "\n[graph]\n";
  if (!prune) {
    os << "skipped: not reached\n";
  } else {
    os << "edges = " << prune->graph.edge_count() << '\n';
    for (const auto& t : prune->tests)
      os << "test " << prune->graph.labels()[t.from] << " -> " << prune->graph.labels()[t.to]
         << ": F = " << num(t.f_statistic) << ", p = " << num(t.p_value)
         << (t.rank_deficient ? ", rank-deficient" : "") << (t.kept ? ", kept" : ", pruned") << '\n';
    os << format_graph(prune->graph, GraphFormat::EdgeList);
  }

  os << "\n[drivers]\n";
  if (!prune) {
    os << "skipped: not reached\n";
  } else if (drivers.empty()) {
    os << "none: the target has no parents in the pruned graph\n";
  } else {
    for (std::size_t i = 0; i < drivers.size(); ++i)
      os << i + 1 << ". " << drivers[i].label << " p = " << num(drivers[i].p_value)
         << " F = " << num(drivers[i].f_statistic) << '\n';
  }

  os << "\n[metrics]\n";
  if (metrics) {
    os << "shd = " << metrics->shd << '\n';
    os << "sid = " << metrics->sid << '\n';
    os << "precision = " << num(metrics->precision) << '\n';
    os << "recall = " << num(metrics->recall) << '\n';
    os << "f1 = " << num(metrics->f1) << '\n';
    os << "l2 = " << num(metrics->l2) << '\n';
    if (truth) os << "truth:\n" << format_graph(*truth, GraphFormat::EdgeList);
  } else {
    os << "skipped: " << (metrics_skip_reason.empty() ? "not reached" : metrics_skip_reason) << '\n';
  }

  os << "\n[queries]\n";
  if (!queries_skip_reason.empty()) {
    os << "skipped: " << queries_skip_reason << '\n';
  } else {
    os << "count = " << queries.size() << '\n';
    for (const auto& q : queries) {
      os << "query " << q.query.archive_name() << " prompt_hash = " << fnv1a_hex(q.query.prompt_text) << '\n';
      os << "  response (" << (q.response.status == TransportStatus::Success ? "ok" : "failed") << ", "
         << q.response.model << "): " << q.response.text << '\n';
    }
    for (const auto& [term, records] : literature) {
      os << "literature " << term << ":\n";
      for (const auto& r : records) os << "  " << r.id << " (" << r.year << ") " << r.title << '\n';
    }
  }

  os << "\n[warnings]\n";
  for (const auto& w : warnings) os << "- " << w << '\n';
  return os.str();
}

std::string PipelineReport::determinism_hash() const { return fnv1a_hex(deterministic_text()); }

std::string PipelineReport::text() const {
  std::ostringstream os;
  os << deterministic_text();
  os << "\ndeterminism_hash = " << determinism_hash() << '\n';
  os << "\n[timings]\n";
  for (const auto& t : timings) os << t.stage << " = " << num(t.seconds) << " s\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Run

namespace {

void write_outputs(const PipelineConfig& cfg, const PipelineReport& report) {
  if (cfg.output_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) fail(ErrorKind::Config, "cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
  write_file(cfg.output_dir / "report.txt", report.text());
  if (report.prune) {
    export_graph(report.prune->graph, GraphFormat::EdgeList, cfg.output_dir / "graph.csv");
    export_graph(report.prune->graph, GraphFormat::Dot, cfg.output_dir / "graph.dot");
  }
  if (report.truth) export_graph(*report.truth, GraphFormat::EdgeList, cfg.output_dir / "truth.csv");
  if (!report.queries.empty()) {
    const auto dir = cfg.output_dir / "prompts";
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Config, "cannot create " + dir.string());
    for (const auto& q : report.queries) {
      std::string body = q.query.prompt_text;
      body += "\n--- response ---\n" + q.response.text + "\n";
      write_file(dir / q.query.archive_name(), body);
    }
  }
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  PipelineReport report;
  report.config_echo = explain_config(cfg);
  std::string stage;

  using clock = std::chrono::steady_clock;
  auto timed = [&](const std::string& name, auto&& body) {
    stage = name;
    const auto start = clock::now();
    body();
    report.timings.push_back({name, std::chrono::duration<double>(clock::now() - start).count()});
  };

  try {
    if (cfg.synthetic) {
      timed("synth", [&] {
        const auto& s = *cfg.synthetic;
        const CausalGraph dag = sample_dag(s.d, s.edge_prob, cfg.seed);
        const SemModel model = sample_mechanisms(dag, s.family, cfg.seed + 1);
        report.samples = sample_data(model, s.n, cfg.seed + 2);
        report.truth = dag;
        report.target = dag.labels()[dag.topological_sort()->back()];
      });
    } else {
      timed("ingest", [&] {
        const IndicatorPanel panel = load_wdi(cfg.real->wdi, cfg.real->indicator_whitelist);
        const TargetSeries target = load_emissions(cfg.real->emissions);
        AssembleResult assembled = assemble_samples(panel, target, cfg.ingest);
        report.samples = std::move(assembled.samples);
        report.dropped_indicators = std::move(assembled.dropped_indicators);
        report.warnings.insert(report.warnings.end(), assembled.warnings.begin(), assembled.warnings.end());
        report.target = cfg.ingest.target_label;
      });
    }

    timed("screen", [&] {
      const CorrelationMatrix corr = correlation_matrix(report.samples, cfg.screen_method);
      report.screen = screen_variables(corr, report.target, cfg.tau_target, cfg.tau_dup);
      report.screen_applied = !cfg.synthetic.has_value();
      if (report.screen_applied) {
        std::vector<std::size_t> keep;
        for (const auto& label : report.screen->kept) keep.push_back(*report.samples.column(label));
        report.samples = report.samples.select_columns(keep);
      }
      if (report.samples.cols() < 2) fail(ErrorKind::Data, "screening left fewer than two variables");
    });

    timed("order", [&] {
      report.order = estimate_order(report.samples, {cfg.ridge, cfg.subsample_cap, cfg.seed + 3, cfg.threads});
    });

    timed("prune", [&] {
      report.prune = prune_edges(report.samples, *report.order, {cfg.alpha, cfg.basis_size, cfg.threads});
      report.warnings.insert(report.warnings.end(), report.prune->warnings.begin(), report.prune->warnings.end());
      report.drivers = rank_drivers(*report.prune, report.target);
    });

    if (report.truth) {
      timed("metrics", [&] { report.metrics = evaluate(*report.truth, report.prune->graph); });
    } else {
      report.metrics_skip_reason = "no ground truth for real-data runs";
    }

    if (!cfg.queries) {
      report.queries_skip_reason = "disabled by configuration";
    } else if (report.drivers.empty()) {
      report.queries_skip_reason = "no drivers to query";
    } else {
      timed("queries", [&] {
        std::vector<Driver> drivers;
        for (const auto& d : report.drivers) drivers.push_back({d.label, indicator_name(d.label)});
        LlmClient llm;
        llm.config = cfg.llm;
        for (auto& q : build_queries(drivers, report.target, cfg.categories, cfg.styles)) {
          LlmResponse r = ask_llm(q.prompt_text, llm);
          report.queries.push_back({std::move(q), std::move(r)});
        }
        if (cfg.literature) {
          LiteratureClient lit;
          lit.config = cfg.literature_cfg;
          for (const auto& d : drivers) {
            const std::vector<std::string> terms = {search_term_for(d.code), search_term_for(report.target)};
            report.literature.emplace_back(literature_query(terms), search_literature(terms, 5, lit));
          }
        }
      });
    }
    report.complete = true;
  } catch (const Error& e) {
    report.complete = false;
    report.failed_stage = stage;
    report.failure = e.what();
    try {
      write_outputs(cfg, report);
    } catch (const Error&) {
    }
    throw Error(e.kind(), "stage '" + stage + "' failed: " + e.what() + " (replay with --seed " +
                              std::to_string(cfg.seed) + ")");
  }

  write_outputs(cfg, report);
  return report;
}

}  // namespace climcausal
