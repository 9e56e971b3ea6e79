// pce: statistics, bounds and exact answers for conjunctive queries.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pce/catalog.hpp"
#include "pce/error.hpp"
#include "pce/estimate.hpp"
#include "pce/format.hpp"
#include "pce/oracle.hpp"
#include "pce/stats.hpp"
#include "pce/verify.hpp"

namespace {

enum Exit { kOk = 0, kInputError = 1, kAllFailed = 2, kOracleCap = 3, kViolations = 4 };

void setup_logging() {
  auto log = spdlog::stderr_color_mt("pce");
  log->set_pattern("%^%l%$: %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("PCE_LOG")) log->set_level(spdlog::level::from_str(env));
  spdlog::set_default_logger(log);
}

std::string log2_text(double log_bound) { return pce::significant(log_bound / std::log(2.0)); }

int cmd_stats_build(const std::string& data, const std::string& config, const std::string& out) {
  auto cfg = pce::load_stats_config(config);
  std::map<std::string, double> seconds;
  auto catalog = pce::build_catalog(cfg, data, &seconds);
  pce::save_catalog(catalog, out);
  for (const auto& spec : cfg.relations) {
    auto n = catalog.entries_for(spec.name).size();
    for (auto kind : {pce::StatCondition::Kind::mcv, pce::StatCondition::Kind::common, pce::StatCondition::Kind::bucket})
      n += catalog.entries_for(spec.name, kind).size();
    std::printf("%-16s %6zu entries  %.3f s\n", spec.name.c_str(), n, seconds[spec.name]);
  }
  std::printf("wrote %s (%zu entries, %zu sequences)\n", out.c_str(), catalog.entries().size(),
              catalog.sequences().size());
  return kOk;
}

void warn_if_stale(const pce::StatisticsCatalog& c) {
  for (const auto& [path, digest] : c.meta().digests) {
    if (!std::filesystem::exists(path))
      spdlog::warn("data file {} no longer exists; statistics may be stale", path);
    else if (pce::file_digest(path) != digest)
      spdlog::warn("data file {} changed since the catalog was built; statistics are stale", path);
  }
}

int cmd_estimate(const std::string& catalog_path, const std::string& query_path, const std::string& methods_text,
                 const std::string& pred_text, const std::string& format, const pce::EstimateOptions& options) {
  auto catalog = pce::load_catalog(catalog_path);
  warn_if_stale(catalog);
  auto q = pce::load_query(query_path);
  auto pred = pce::parse_predicate(pred_text);
  auto methods = pce::parse_methods(methods_text);

  auto stats = pce::catalog_statistics(catalog, q, pred);
  std::optional<pce::JoinSequences> join;
  if (q.atoms().size() == 2) {
    try {
      join = pce::catalog_join_sequences(catalog, q);
    } catch (const pce::StatisticsError& e) {
      spdlog::debug("dsb: {}", e.what());
    }
  }
  auto outcomes = pce::run_methods(q, stats, methods, options, join);
  auto best = pce::best_outcome(outcomes);

  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["query"] = pce::to_string(q);
    doc["predicate"] = pce::to_string(pred);
    doc["methods"] = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) {
      nlohmann::ordered_json m{{"method", pce::to_string(o.method)}, {"status", pce::to_string(o.status)}};
      if (o.status == pce::MethodOutcome::Status::ok) {
        m["bound"] = pce::significant(o.result.bound);
        m["log2"] = log2_text(o.result.log_bound);
        m["witness"] = pce::describe(o.result.witness);
      } else {
        m["reason"] = o.reason;
      }
      doc["methods"].push_back(std::move(m));
    }
    if (best)
      doc["min"] = {{"method", pce::to_string(best->method)},
                    {"bound", pce::significant(best->result.bound)},
                    {"log2", log2_text(best->result.log_bound)}};
    else
      doc["min"] = nullptr;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "query: " << pce::to_string(q) << "\n";
    if (pred.kind != pce::PredicateExpr::Kind::none) std::cout << "predicate: " << pce::to_string(pred) << "\n";
    for (const auto& o : outcomes) {
      std::cout << pce::to_string(o.method) << ": ";
      if (o.status == pce::MethodOutcome::Status::ok)
        std::cout << pce::significant(o.result.bound) << " (log2 " << log2_text(o.result.log_bound) << ") "
                  << pce::describe(o.result.witness) << "\n";
      else
        std::cout << pce::to_string(o.status) << " (" << o.reason << ")\n";
    }
    if (best)
      std::cout << "min: " << pce::significant(best->result.bound) << " (log2 " << log2_text(best->result.log_bound)
                << ") via " << pce::to_string(best->method) << "\n";
    else
      std::cout << "min: none\n";
  }
  return best ? kOk : kAllFailed;
}

int cmd_oracle(const std::string& data, const std::string& query_path, std::int64_t cap) {
  auto db = pce::load_database(data);
  auto q = pce::load_query(query_path);
  std::cout << pce::exact_join(db, q, cap).count << "\n";
  return kOk;
}

int cmd_verify(const std::string& data, const std::string& suite, std::uint64_t seed, int trials,
               const std::string& format) {
  if (trials < 0) throw pce::InputError("--trials must be nonnegative");
  std::optional<pce::Database> db;
  if (!data.empty()) db = pce::load_database(data);
  auto report = pce::run_verification(pce::parse_suite(suite), seed, trials, db ? &*db : nullptr);
  std::cout << (format == "json" ? report.json() + "\n" : report.text());
  return report.violations() == 0 ? kOk : kViolations;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Pessimistic cardinality estimation: upper bounds on conjunctive query output sizes"};
  app.require_subcommand(1);

  std::string data, config, catalog, query, methods = "all", pred, format = "text", suite = "all";
  std::uint64_t seed = 1;
  int trials = 100;
  std::int64_t cap = pce::kDefaultOracleCap;
  pce::EstimateOptions options;

  auto* stats = app.add_subcommand("stats", "Statistics catalog commands");
  stats->require_subcommand(1);
  auto* build = stats->add_subcommand("build", "Compute statistics from CSV files into a catalog");
  build->add_option("--data", data, "Directory holding the CSV files")->required();
  build->add_option("--config", config, "Statistics config (JSON)")->required();
  build->add_option("--catalog", catalog, "Output catalog path")->required();

  auto* estimate = app.add_subcommand("estimate", "Upper bounds on a query's output size");
  estimate->add_option("--catalog", catalog, "Statistics catalog")->required();
  estimate->add_option("--query", query, "Query file")->required();
  estimate->add_option("--methods", methods, "Comma-separated subset of agm,cb,boundsketch,polyb,dsb, or all");
  estimate->add_option("--pred", pred, "Filter predicate, e.g. \"A=5 and (B=3 or B=4)\"");
  estimate->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  estimate->add_option("--max-vars", options.max_chain_vars, "Variable cap for the chain bound's ordering search");
  estimate->add_flag("--group-by", options.group_by, "polyb bounds the projection on the head variables");

  auto* oracle = app.add_subcommand("oracle", "Exact output size");
  oracle->add_option("--data", data, "Directory holding the CSV files")->required();
  oracle->add_option("--query", query, "Query file")->required();
  oracle->add_option("--oracle-cap", cap, "Largest intermediate result allowed");

  auto* verify = app.add_subcommand("verify", "Seeded property checks");
  verify->add_option("suite", suite, "soundness, dominance, shannon, compression or all")
      ->check(CLI::IsMember({"soundness", "dominance", "shannon", "compression", "all"}));
  verify->add_option("--data", data, "Also check every relation in this directory");
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--trials", trials, "Random instances per check");
  verify->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (build->parsed()) return cmd_stats_build(data, config, catalog);
    if (estimate->parsed()) return cmd_estimate(catalog, query, methods, pred, format, options);
    if (oracle->parsed()) return cmd_oracle(data, query, cap);
    if (verify->parsed()) return cmd_verify(data, suite, seed, trials, format);
  } catch (const pce::OracleCapExceeded& e) {
    spdlog::error("{}", e.what());
    return kOracleCap;
  } catch (const pce::Error& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  }
  return kOk;
}
