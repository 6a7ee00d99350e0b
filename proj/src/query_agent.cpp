#include "climcausal/query_agent.hpp"

#include "climcausal/error.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <map>
#include <memory>

namespace climcausal {

using nlohmann::json;

std::string to_string(QueryCategory category) {
  switch (category) {
    case QueryCategory::Direct: return "Direct";
    case QueryCategory::Preventative: return "Preventative";
    case QueryCategory::Facilitative: return "Facilitative";
    case QueryCategory::Resultative: return "Resultative";
    case QueryCategory::Influential: return "Influential";
  }
  return "?";
}

std::string to_string(PromptStyle style) {
  switch (style) {
    case PromptStyle::ZeroShot: return "zero-shot";
    case PromptStyle::FewShot: return "few-shot";
    case PromptStyle::ChainOfThought: return "chain-of-thought";
  }
  return "?";
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

QueryCategory parse_category(const std::string& text) {
  for (auto c : all_categories())
    if (lower(to_string(c)) == lower(text)) return c;
  fail(ErrorKind::Config, "unknown query category '" + text + "'");
}

PromptStyle parse_style(const std::string& text) {
  const std::string t = lower(text);
  if (t == "cot") return PromptStyle::ChainOfThought;
  for (auto s : all_styles())
    if (to_string(s) == t) return s;
  fail(ErrorKind::Config, "unknown prompt style '" + text + "'");
}

std::set<QueryCategory> all_categories() {
  return {QueryCategory::Direct, QueryCategory::Preventative, QueryCategory::Facilitative,
          QueryCategory::Resultative, QueryCategory::Influential};
}

std::set<PromptStyle> all_styles() { return {PromptStyle::ZeroShot, PromptStyle::FewShot, PromptStyle::ChainOfThought}; }

const std::vector<std::string>& category_verbs(QueryCategory category) {
  static const std::map<QueryCategory, std::vector<std::string>> verbs = {
      {QueryCategory::Direct, {"increase", "trigger"}},
      {QueryCategory::Preventative, {"prevent", "reduce", "inhibit"}},
      {QueryCategory::Facilitative, {"enable", "allow", "support"}},
      {QueryCategory::Resultative, {"lead to", "result in", "cause"}},
      {QueryCategory::Influential, {"influence", "impact", "affect"}},
  };
  return verbs.at(category);
}

bool is_wdi_code(const std::string& code) {
  std::size_t segments = 0, len = 0;
  for (char c : code) {
    if (c == '.') {
      if (len == 0) return false;
      ++segments;
      len = 0;
    } else if (std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c))) {
      ++len;
    } else {
      return false;
    }
  }
  if (len == 0) return false;
  return segments + 1 >= 2;
}

std::string indicator_name(const std::string& code) {
  static const std::map<std::string, std::string> names = {
      {"EG.CFT.ACCS.RU.ZS", "Access to clean fuels and technologies for cooking, rural (% of rural population)"},
      {"EG.CFT.ACCS.UR.ZS", "Access to clean fuels and technologies for cooking, urban (% of urban population)"},
      {"SP.URB.TOTL.IN.ZS", "Urban population (% of total population)"},
      {"CO2E.PC", "Greenhouse gas emissions per capita (t CO2e)"},
  };
  const auto it = names.find(code);
  return it == names.end() ? code : it->second;
}

std::string search_term_for(const std::string& code) {
  static const std::map<std::string, std::string> terms = {
      {"EG.CFT.ACCS.RU.ZS", "clean fuels"},
      {"EG.CFT.ACCS.UR.ZS", "clean fuels"},
      {"SP.URB.TOTL.IN.ZS", "urban population"},
      {"CO2E.PC", "carbon emissions"},
  };
  const auto it = terms.find(code);
  return it == terms.end() ? code : it->second;
}

std::string CausalQuery::archive_name() const {
  return driver.code + "_" + to_string(category) + "_" + to_string(style) + ".txt";
}

namespace {

std::string question(const CausalQuery& q) {
  const std::string d = q.driver.name + " (" + q.driver.code + ")";
  const std::string t = indicator_name(q.target) == q.target ? q.target
                                                              : indicator_name(q.target) + " (" + q.target + ")";
  switch (q.category) {
    case QueryCategory::Direct:
      return "Does an increase in " + d + " directly increase or trigger a change in " + t + "?";
    case QueryCategory::Preventative:
      return "Can " + d + " prevent, reduce or inhibit growth in " + t + "?";
    case QueryCategory::Facilitative:
      return "Does " + d + " enable, allow or support lower levels of " + t + "?";
    case QueryCategory::Resultative:
      return "Do changes in " + d + " lead to, result in or cause changes in " + t + "?";
    case QueryCategory::Influential:
      return "Could variability in " + d + " influence, impact or affect " + t + "?";
  }
  return {};
}

constexpr const char* kSystemLine =
    "You are an expert in climate economics. Answer the causal question about World Bank indicators.";

constexpr const char* kExemplars =
    "Example 1\n"
    "Q: Could variability in access to electricity (EG.ELC.ACCS.ZS) affect energy use per capita (EG.USE.PCAP.KG.OE)?\n"
    "A: Yes. Wider electricity access raises household and industrial energy demand, so variability in access "
    "plausibly affects energy use per capita, although income is a common driver of both.\n"
    "\n"
    "Example 2\n"
    "Q: Can forest area (AG.LND.FRST.ZS) prevent, reduce or inhibit growth in the urban population share "
    "(SP.URB.TOTL.IN.ZS)?\n"
    "A: Unlikely. Forest cover and urbanization are both shaped by land-use policy, but there is no direct "
    "mechanism by which forest area limits migration to cities.\n";

constexpr const char* kReasoningLine =
    "Think step by step: state the mechanism, name possible confounders, then give a yes/no answer with a "
    "confidence level.";

}  // namespace

std::string render_prompt(const CausalQuery& query) {
  std::string out = kSystemLine;
  out += "\n\n";
  if (query.style == PromptStyle::FewShot) {
    out += kExemplars;
    out += "\nNow answer the following.\n";
  }
  out += "Q: " + question(query) + "\n";
  if (query.style == PromptStyle::ChainOfThought) {
    out += kReasoningLine;
    out += "\n";
  }
  return out;
}

std::vector<CausalQuery> build_queries(const std::vector<Driver>& drivers, const std::string& target,
                                       const std::set<QueryCategory>& categories,
                                       const std::set<PromptStyle>& styles) {
  if (drivers.empty()) fail(ErrorKind::Config, "query generation needs at least one driver");
  if (categories.empty()) fail(ErrorKind::Config, "query generation needs at least one category");
  if (styles.empty()) fail(ErrorKind::Config, "query generation needs at least one style");
  std::vector<CausalQuery> out;
  out.reserve(drivers.size() * categories.size() * styles.size());
  for (const auto& d : drivers) {
    if (!is_wdi_code(d.code)) fail(ErrorKind::Config, "driver code '" + d.code + "' is not an indicator code");
    Driver driver = d;
    if (driver.name.empty()) driver.name = indicator_name(driver.code);
    for (auto c : categories)
      for (auto s : styles) {
        CausalQuery q{c, s, driver, target, {}};
        q.prompt_text = render_prompt(q);
        out.push_back(std::move(q));
      }
  }
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

// ---------------------------------------------------------------------------
// Chat completion

namespace {

bool transient(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

}  // namespace

LlmResponse ask_llm(const std::string& prompt, LlmClient& client) {
  const LlmConfig& cfg = client.config;
  auto log = [&](const std::string& line) {
    if (client.log) client.log(line);
  };

  if (cfg.stub) {
    LlmResponse r;
    r.text = "[stub response " + fnv1a_hex(prompt) + "] No model was queried; this placeholder stands in for the answer.";
    r.model = "stub";
    r.status = TransportStatus::Success;
    r.attempts = 1;
    return r;
  }

  if (cfg.max_retries < 0) fail(ErrorKind::Config, "max_retries must be non-negative");
  const char* token = client.getenv(cfg.token_env.c_str());
  if (token == nullptr || *token == '\0')
    fail(ErrorKind::Config, "live LLM mode needs an auth token in $" + cfg.token_env);

  std::unique_ptr<HttpTransport> owned;
  HttpTransport* transport = client.transport;
  if (transport == nullptr) {
    owned = make_http_transport();
    transport = owned.get();
  }

  HttpRequest req;
  req.method = "POST";
  req.url = cfg.endpoint;
  req.headers = {{"Authorization", std::string("Bearer ") + token}};
  req.timeout_s = cfg.timeout_s;
  req.body = json{{"model", cfg.model}, {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}}.dump();

  double delay = cfg.backoff_initial_s;
  const int attempts = cfg.max_retries + 1;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const auto start = client.clock.now();
    const HttpResponse resp = transport->send(req);
    const double ms = std::chrono::duration<double, std::milli>(client.clock.now() - start).count();
    log("llm attempt " + std::to_string(attempt) + "/" + std::to_string(attempts) + " status " +
        std::to_string(resp.status) + (resp.error.empty() ? "" : " (" + resp.error + ")"));

    if (resp.status == 401 || resp.status == 403)
      fail(ErrorKind::Transport, "LLM endpoint rejected credentials (HTTP " + std::to_string(resp.status) + ")");
    if (resp.status >= 200 && resp.status < 300) {
      LlmResponse r;
      try {
        const json body = json::parse(resp.body);
        r.text = body.at("choices").at(0).at("message").at("content").get<std::string>();
        r.model = body.value("model", cfg.model);
        if (body.contains("usage")) {
          r.prompt_tokens = body["usage"].value("prompt_tokens", 0);
          r.completion_tokens = body["usage"].value("completion_tokens", 0);
        }
      } catch (const json::exception& e) {
        fail(ErrorKind::Data, std::string("unparseable chat-completion payload: ") + e.what());
      }
      r.latency_ms = ms;
      r.status = TransportStatus::Success;
      r.attempts = attempt;
      return r;
    }
    last_error = resp.status == 0 ? resp.error : "HTTP " + std::to_string(resp.status);
    if (!transient(resp.status))
      fail(ErrorKind::Transport, "LLM request failed: " + last_error + " after " + std::to_string(attempt) +
                                     " attempt(s)");
    if (attempt < attempts) {
      client.clock.sleep(std::chrono::duration<double>(delay));
      delay *= cfg.backoff_factor;
    }
  }
  fail(ErrorKind::Transport,
       "LLM request failed after " + std::to_string(attempts) + " attempts (last: " + last_error + ")");
}

LlmResponse ask_llm(const std::string& prompt, const LlmConfig& cfg) {
  LlmClient client;
  client.config = cfg;
  return ask_llm(prompt, client);
}

// ---------------------------------------------------------------------------
// Literature search

std::string literature_query(const std::vector<std::string>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += " AND ";
    out += "\"" + t + "\"";
  }
  return out;
}

namespace {

// Fixture records, not real search results.
std::vector<ArticleRecord> fixture_records() {
  return {
      {"FIXTURE-0001", "[fixture] Clean cooking fuels and household carbon emissions in low-income economies", 2019,
       "fixture"},
      {"FIXTURE-0002", "[fixture] Urbanization and per-capita greenhouse gas emissions: a panel study", 2020, "fixture"},
      {"FIXTURE-0003", "[fixture] Rural energy access transitions and emission trajectories", 2018, "fixture"},
      {"FIXTURE-0004", "[fixture] Solid fuel use, health and climate co-benefits of clean fuels", 2021, "fixture"},
      {"FIXTURE-0005", "[fixture] Causal discovery methods applied to development indicators", 2022, "fixture"},
  };
}

json fetch_json(LiteratureClient& client, HttpTransport& transport, const std::string& url) {
  const double rate = client.config.max_requests_per_s;
  if (client.last_request && rate > 0.0) {
    const std::chrono::duration<double> gap(1.0 / rate);
    const auto elapsed = client.clock.now() - *client.last_request;
    if (elapsed < gap) client.clock.sleep(gap - elapsed);
  }
  client.last_request = client.clock.now();
  HttpRequest req;
  req.url = url;
  req.timeout_s = client.config.timeout_s;
  const HttpResponse resp = transport.send(req);
  if (client.log) client.log("entrez " + url + " status " + std::to_string(resp.status));
  if (resp.status < 200 || resp.status >= 300)
    fail(ErrorKind::Transport, "Entrez request failed: " +
                                   (resp.status == 0 ? resp.error : "HTTP " + std::to_string(resp.status)));
  try {
    return json::parse(resp.body);
  } catch (const json::exception& e) {
    fail(ErrorKind::Data, std::string("unparseable Entrez payload: ") + e.what());
  }
}

}  // namespace

std::vector<ArticleRecord> search_literature(const std::vector<std::string>& terms, int max_results,
                                             LiteratureClient& client) {
  if (terms.empty()) fail(ErrorKind::Config, "literature search needs at least one term");
  if (max_results < 1) fail(ErrorKind::Config, "max_results must be at least 1");

  if (client.config.stub) {
    auto records = fixture_records();
    if (records.size() > static_cast<std::size_t>(max_results)) records.resize(static_cast<std::size_t>(max_results));
    return records;
  }

  std::unique_ptr<HttpTransport> owned;
  HttpTransport* transport = client.transport;
  if (transport == nullptr) {
    owned = make_http_transport();
    transport = owned.get();
  }

  const std::string base = client.config.base_url;
  const json search = fetch_json(client, *transport,
                                 base + "/esearch.fcgi?db=pubmed&retmode=json&retmax=" + std::to_string(max_results) +
                                     "&term=" + url_encode(literature_query(terms)));
  std::vector<std::string> ids;
  try {
    for (const auto& id : search.at("esearchresult").at("idlist")) ids.push_back(id.get<std::string>());
  } catch (const json::exception& e) {
    fail(ErrorKind::Data, std::string("unexpected esearch payload: ") + e.what());
  }
  if (ids.size() > static_cast<std::size_t>(max_results)) ids.resize(static_cast<std::size_t>(max_results));
  if (ids.empty()) return {};

  std::string joined;
  for (const auto& id : ids) joined += (joined.empty() ? "" : ",") + id;
  const json summary =
      fetch_json(client, *transport, base + "/esummary.fcgi?db=pubmed&retmode=json&id=" + url_encode(joined));

  std::vector<ArticleRecord> out;
  try {
    const json& result = summary.at("result");
    for (const auto& id : ids) {
      if (!result.contains(id)) continue;
      const json& doc = result.at(id);
      ArticleRecord rec;
      rec.id = id;
      rec.title = doc.value("title", "");
      const std::string date = doc.value("pubdate", "");
      if (date.size() >= 4 && std::isdigit(static_cast<unsigned char>(date[0]))) rec.year = std::stoi(date.substr(0, 4));
      out.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Data, std::string("unexpected esummary payload: ") + e.what());
  }
  return out;
}

std::vector<ArticleRecord> search_literature(const std::vector<std::string>& terms, int max_results,
                                             const LiteratureConfig& cfg) {
  LiteratureClient client;
  client.config = cfg;
  return search_literature(terms, max_results, client);
}

}  // namespace climcausal
