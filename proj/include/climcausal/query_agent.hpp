#pragma once

#include "climcausal/http_transport.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace climcausal {

enum class QueryCategory { Direct, Preventative, Facilitative, Resultative, Influential };
enum class PromptStyle { ZeroShot, FewShot, ChainOfThought };

struct Driver {
  std::string code;  // WDI-style indicator code, e.g. EG.CFT.ACCS.RU.ZS
  std::string name;
};

struct CausalQuery {
  QueryCategory category = QueryCategory::Direct;
  PromptStyle style = PromptStyle::ZeroShot;
  Driver driver;
  std::string target;
  std::string prompt_text;

  // "<driver>_<category>_<style>.txt"
  std::string archive_name() const;
};

// Upper-case alphanumeric segments separated by dots, at least two segments.
bool is_wdi_code(const std::string& code);

const std::vector<std::string>& category_verbs(QueryCategory category);

std::string render_prompt(const CausalQuery& query);

// drivers x categories x styles, in that nesting order (categories and styles
// in enum order).
std::vector<CausalQuery> build_queries(const std::vector<Driver>& drivers, const std::string& target,
                                       const std::set<QueryCategory>& categories,
                                       const std::set<PromptStyle>& styles);

std::string to_string(QueryCategory category);
std::string to_string(PromptStyle style);
QueryCategory parse_category(const std::string& text);
PromptStyle parse_style(const std::string& text);
std::set<QueryCategory> all_categories();
std::set<PromptStyle> all_styles();

// Human-readable names for the headline clean-fuel and urbanization indicators; other codes
// map to themselves.
std::string indicator_name(const std::string& code);

// --- chat completion -------------------------------------------------------

struct LlmConfig {
  bool stub = true;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4";
  std::string token_env = "OPENAI_API_KEY";
  double timeout_s = 60.0;
  int max_retries = 3;           // extra attempts after the first
  double backoff_initial_s = 1.0;
  double backoff_factor = 2.0;
};

enum class TransportStatus { Success, Failed };

struct LlmResponse {
  std::string text;
  std::string model;
  double latency_ms = 0.0;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  TransportStatus status = TransportStatus::Failed;
  int attempts = 0;
};

struct LlmClient {
  LlmConfig config;
  HttpTransport* transport = nullptr;  // live mode; null means make_http_transport()
  Clock clock;
  std::function<void(const std::string&)> log;  // one line per attempt
  // Environment lookup, replaceable in tests.
  std::function<const char*(const char*)> getenv = [](const char* name) { return std::getenv(name); };
};

LlmResponse ask_llm(const std::string& prompt, LlmClient& client);
LlmResponse ask_llm(const std::string& prompt, const LlmConfig& cfg);

// 64-bit FNV-1a, printed as 16 hex digits by fnv1a_hex.
std::uint64_t fnv1a(const std::string& text);
std::string fnv1a_hex(const std::string& text);

// --- literature search ------------------------------------------------------

struct ArticleRecord {
  std::string id;
  std::string title;
  int year = 0;
  std::string source = "pubmed";
};

struct LiteratureConfig {
  bool stub = true;
  std::string base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
  double max_requests_per_s = 3.0;
  double timeout_s = 30.0;
};

struct LiteratureClient {
  LiteratureConfig config;
  HttpTransport* transport = nullptr;
  Clock clock;
  std::function<void(const std::string&)> log;
  // Time of the previous request; requests are spaced by 1 / max_requests_per_s.
  std::optional<std::chrono::steady_clock::time_point> last_request;
};

// Terms quoted and joined with AND.
std::string literature_query(const std::vector<std::string>& terms);
// Search terms for a driver code ("clean fuels", "urban population", ...),
// falling back to the code itself.
std::string search_term_for(const std::string& code);

std::vector<ArticleRecord> search_literature(const std::vector<std::string>& terms, int max_results,
                                             LiteratureClient& client);
std::vector<ArticleRecord> search_literature(const std::vector<std::string>& terms, int max_results,
                                             const LiteratureConfig& cfg = {});

}  // namespace climcausal
