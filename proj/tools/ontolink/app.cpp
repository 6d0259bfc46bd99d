#include "ontolink/app.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ontolink/app_config.hpp"
#include "ontolink/dump.hpp"
#include "ontolink/errors.hpp"
#include "ontolink/evaluation.hpp"
#include "ontolink/ingest.hpp"
#include "ontolink/lexical_index.hpp"
#include "ontolink/ntriples.hpp"
#include "ontolink/pipeline.hpp"
#include "ontolink/vector_index.hpp"

namespace ontolink::app {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_file;

  // ingest
  std::string ontology;
  std::string dump_out;
  std::string ingest_report;
  std::string ingest_config;

  // index
  std::string dump_in;
  std::string index_dir;
  std::optional<std::size_t> dimension;

  // link
  std::string mentions_file;
  std::optional<std::string> mention;
  std::optional<std::string> context;
  std::string output;
  std::optional<double> tau;
  std::optional<std::size_t> k_lex;
  std::optional<std::size_t> k_sem;
  std::optional<std::size_t> k_tot;
  std::optional<int> max_hops;
  std::optional<std::string> provider;
  std::string mock_fixture;
  std::size_t jobs = 1;
  std::string run_log;
  std::string prompts_dir;

  // eval
  std::string results;
  std::string gold;
  std::string mismatches_out;

  // adjudicate
  std::string mismatches_in;
  std::string distribution_out;

  // compare-export
  std::string run_a;
  std::string run_b;
  std::string name_a = "system_a";
  std::string name_b = "system_b";
};

std::ifstream open_in(const fs::path& p, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(p, mode);
  if (!in) throw ConfigError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p, std::ios::openmode mode = std::ios::out) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, mode);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

/// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write(out);
}

fs::path pick(const std::string& flag, const fs::path& configured, const char* what) {
  if (!flag.empty()) return flag;
  if (!configured.empty()) return configured;
  throw ConfigError(std::string("no ") + what + " given");
}

std::vector<EntityRecord> read_dump(const fs::path& p) {
  auto in = open_in(p);
  return load_dump(in);
}

AppConfig effective_config(const Options& o) {
  AppConfig c = o.config_file.empty() ? AppConfig{} : AppConfig::load(o.config_file);
  if (o.tau) c.pipeline.tau = *o.tau;
  if (o.max_hops) c.pipeline.max_hops = *o.max_hops;
  if (o.k_lex) c.pipeline.retrieval.k_lex = *o.k_lex;
  if (o.k_sem) c.pipeline.retrieval.k_sem = *o.k_sem;
  if (o.k_tot) {
    c.pipeline.retrieval.k_tot = *o.k_tot;
  } else if (o.k_lex || o.k_sem) {
    c.pipeline.retrieval.k_tot = c.pipeline.retrieval.k_lex + c.pipeline.retrieval.k_sem;
  }
  if (o.provider) c.provider.kind = *o.provider;
  if (!o.mock_fixture.empty()) c.provider.mock_fixture = o.mock_fixture;
  if (o.dimension) c.embedding.dimension = *o.dimension;
  if (!o.prompts_dir.empty()) c.paths.prompts_dir = o.prompts_dir;
  if (!o.ingest_config.empty()) c.ingest = IngestConfig::from_json(read_json_file(o.ingest_config));
  c.validate();
  return c;
}

PromptLibrary prompts_for(const AppConfig& c) {
  return c.paths.prompts_dir.empty() ? PromptLibrary::builtin() : PromptLibrary::load_dir(c.paths.prompts_dir);
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = effective_config(o);
  const auto source = pick(o.ontology, config.paths.ontology, "ontology file");
  const auto dump_path = pick(o.dump_out, config.paths.dump, "dump output (-o)");

  auto in = open_in(source, std::ios::in | std::ios::binary);
  const auto triples = parse_graph(in, RdfFormat::ntriples);
  const auto result = extract_entities(triples, config.ingest);

  auto dump = open_out(dump_path, std::ios::out | std::ios::binary);
  write_dump(result.records, dump);
  const auto report = result.report.to_json();
  if (!o.ingest_report.empty()) {
    auto r = open_out(o.ingest_report, std::ios::out | std::ios::binary);
    r << report.dump(2) << '\n';
  }
  err << "ingested " << result.report.emitted << " concepts from " << triples.size() << " triples ("
      << result.report.skipped << " skipped)\n";
  (void)out;
  return kExitOk;
}

int cmd_index(const Options& o, std::ostream&, std::ostream& err) {
  const auto config = effective_config(o);
  const auto dump_path = pick(o.dump_in, config.paths.dump, "dump");
  const auto dir = pick(o.index_dir, config.paths.index_dir, "index directory (-o)");
  const auto records = read_dump(dump_path);
  const RecordStore store(records);

  const auto lexical = LexicalIndex::build(store.records());
  const auto embedder = make_embedding_provider(config.embedding);
  const auto vectors = VectorIndex::build(store.records(), *embedder);

  fs::create_directories(dir);
  {
    auto f = open_out(dir / kLexicalIndexFile, std::ios::out | std::ios::binary);
    lexical.save(f);
  }
  {
    auto f = open_out(dir / kVectorIndexFile, std::ios::out | std::ios::binary);
    vectors.save(f);
  }
  err << "indexed " << store.size() << " concepts into " << dir.string() << '\n';
  return kExitOk;
}

int cmd_link(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = effective_config(o);
  const auto dump_path = pick(o.dump_in, config.paths.dump, "dump");
  const auto dir = pick(o.index_dir, config.paths.index_dir, "index directory");

  std::vector<Mention> mentions;
  if (o.mention) {
    mentions.push_back({*o.mention, o.context});
    mentions.back().validate();
  } else if (!o.mentions_file.empty()) {
    auto in = open_in(o.mentions_file);
    mentions = load_mentions(in);
  } else {
    throw ConfigError("give --mention or --mentions");
  }

  const RecordStore store(read_dump(dump_path));
  auto lex_in = open_in(dir / kLexicalIndexFile, std::ios::in | std::ios::binary);
  const auto lexical = LexicalIndex::load(lex_in);
  auto vec_in = open_in(dir / kVectorIndexFile, std::ios::in | std::ios::binary);
  const auto vectors = VectorIndex::load(vec_in);
  const auto embedder = make_embedding_provider(config.embedding);
  if (vectors.provider_name() != embedder->name()) {
    throw ConfigError("vector index was built with " + vectors.provider_name() + ", configured encoder is " +
                      embedder->name());
  }
  if (lexical.doc_count() != store.size() || vectors.size() != store.size()) {
    throw ConfigError("indexes do not match the dump; rebuild them with `ontolink index`");
  }

  const auto provider = make_completion_provider(config.provider);
  const auto prompts = prompts_for(config);
  const RetrievalIndexes indexes{store, lexical, vectors, *embedder};

  std::vector<RunLogEntry> log;
  const auto results = link_batch(mentions, indexes, *provider, config.pipeline, o.jobs, prompts,
                                  o.run_log.empty() ? nullptr : &log);

  std::size_t failed = 0;
  emit(o.output, out, [&](std::ostream& s) {
    for (const auto& r : results) {
      s << serialize_result(r) << '\n';
      if (r.error) ++failed;
    }
  });
  if (!o.run_log.empty()) {
    auto f = open_out(o.run_log, std::ios::out | std::ios::binary);
    for (const auto& e : log) f << log_entry_to_json(e).dump() << '\n';
  }
  if (failed > 0) {
    err << failed << " of " << results.size() << " mentions failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream&) {
  auto rin = open_in(o.results);
  const auto results = load_results(rin);
  auto gin = open_in(o.gold);
  const auto gold = load_gold(gin);

  std::vector<RunRecord> records;
  records.reserve(results.size());
  for (const auto& r : results) records.push_back(RunRecord::from(r));
  const auto report = compute_metrics(records, gold);

  emit(o.output, out, [&](std::ostream& s) { s << report_to_json(report, o.tau).dump(2) << '\n'; });
  if (!o.mismatches_out.empty()) {
    auto f = open_out(o.mismatches_out, std::ios::out | std::ios::binary);
    for (const auto& c : find_mismatches(results, gold)) f << case_to_json(c).dump() << '\n';
  }
  return kExitOk;
}

EntityRecord lookup_or_stub(const RecordStore& store, const std::string& curie) {
  if (const auto* r = store.find(curie)) return *r;
  EntityRecord stub;
  stub.curie = curie;
  stub.label = curie;
  return stub;
}

int cmd_adjudicate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = effective_config(o);
  auto cin_ = open_in(o.mismatches_in);
  const auto cases = load_cases(cin_);
  const RecordStore store(read_dump(pick(o.dump_in, config.paths.dump, "dump")));
  const auto provider = make_completion_provider(config.provider);
  const auto prompts = prompts_for(config);

  std::vector<AdjudicationLabel> labels;
  std::size_t failed = 0;
  std::ostringstream lines;
  for (const auto& c : cases) {
    std::vector<EntityRecord> gold;
    for (const auto& g : c.gold) gold.push_back(lookup_or_stub(store, g));
    try {
      const auto label = adjudicate(*provider, c.query, lookup_or_stub(store, c.chosen), gold, prompts);
      lines << adjudication_to_json(c, label).dump() << '\n';
      labels.push_back(label);
    } catch (const ProviderError& e) {
      ++failed;
      err << "adjudication failed for \"" << c.query << "\": " << e.what() << '\n';
    }
  }
  emit(o.output, out, [&](std::ostream& s) { s << lines.str(); });
  if (!o.distribution_out.empty()) {
    auto f = open_out(o.distribution_out, std::ios::out | std::ios::binary);
    const auto shares = label_distribution(std::span<const AdjudicationLabel>(labels));
    nlohmann::ordered_json j;
    j["total"] = labels.size();
    j["labels"] = distribution_to_json(shares);
    f << j.dump(2) << '\n';
  }
  return failed > 0 ? kExitPartial : kExitOk;
}

int cmd_compare_export(const Options& o, std::ostream& out, std::ostream&) {
  const auto config = effective_config(o);
  auto a_in = open_in(o.run_a);
  const auto a = load_results(a_in);
  auto b_in = open_in(o.run_b);
  const auto b = load_results(b_in);
  const RecordStore store(read_dump(pick(o.dump_in, config.paths.dump, "dump")));
  const auto j = export_comparison(a, b, store, o.name_a, o.name_b);
  emit(o.output, out, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
  return kExitOk;
}

void add_pipeline_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--tau", o.tau, "Confidence threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--k-lex", o.k_lex, "Lexical hits per query")->check(CLI::PositiveNumber);
  cmd->add_option("--k-sem", o.k_sem, "Semantic hits per query")->check(CLI::PositiveNumber);
  cmd->add_option("--k-tot", o.k_tot, "Fused candidate cap (default k-lex + k-sem)")->check(CLI::PositiveNumber);
  cmd->add_option("--max-hops", o.max_hops, "Synonym retry hops (0 or 1)")->check(CLI::Range(0, 1));
}

void add_provider_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--provider", o.provider, "Completion provider")->check(CLI::IsMember({"mock", "http"}));
  cmd->add_option("--mock-fixture", o.mock_fixture, "Mock provider fixture JSON")->check(CLI::ExistingFile);
  cmd->add_option("--prompts", o.prompts_dir, "Directory of *.prompt overrides")->check(CLI::ExistingDirectory);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"ontolink: ontology entity linking"};
  app.name("ontolink");
  app.require_subcommand(1);
  app.add_option("--config", o.config_file, "AppConfig JSON file")->check(CLI::ExistingFile);

  auto* ingest = app.add_subcommand("ingest", "N-Triples ontology -> JSON dump");
  ingest->add_option("ontology", o.ontology, "N-Triples file");
  ingest->add_option("-o,--output", o.dump_out, "Dump file to write");
  ingest->add_option("--report", o.ingest_report, "Ingest report JSON to write");
  ingest->add_option("--ingest-config", o.ingest_config, "Ingest config JSON")->check(CLI::ExistingFile);

  auto* index = app.add_subcommand("index", "JSON dump -> lexical and vector indexes");
  index->add_option("dump", o.dump_in, "Dump file");
  index->add_option("-o,--output", o.index_dir, "Index directory");
  index->add_option("--dimension", o.dimension, "Embedding dimension")->check(CLI::PositiveNumber);

  auto* link_cmd = app.add_subcommand("link", "Link mentions to concepts (JSON-lines output)");
  link_cmd->add_option("--dump", o.dump_in, "Dump file");
  link_cmd->add_option("--index", o.index_dir, "Index directory");
  auto* one = link_cmd->add_option("--mention", o.mention, "A single mention");
  auto* many = link_cmd->add_option("--mentions", o.mentions_file, "JSON array of mentions")->check(CLI::ExistingFile);
  one->excludes(many);
  link_cmd->add_option("--context", o.context, "Context for --mention")->needs(one);
  link_cmd->add_option("-o,--output", o.output, "Results file (default stdout)");
  link_cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 256));
  link_cmd->add_option("--run-log", o.run_log, "Write prompts and responses as JSON-lines");
  link_cmd->add_option("--dimension", o.dimension, "Embedding dimension")->check(CLI::PositiveNumber);
  add_pipeline_flags(link_cmd, o);
  add_provider_flags(link_cmd, o);

  auto* eval = app.add_subcommand("eval", "Accuracy, retry and synonym metrics");
  eval->add_option("results", o.results, "Results JSON-lines")->required()->check(CLI::ExistingFile);
  eval->add_option("--gold", o.gold, "Gold JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--tau", o.tau, "Threshold to record in the report")->check(CLI::Range(0.0, 1.0));
  eval->add_option("-o,--output", o.output, "Report file (default stdout)");
  eval->add_option("--mismatches", o.mismatches_out, "Write final predictions outside the gold set");

  auto* adj = app.add_subcommand("adjudicate", "Classify prediction/gold disagreements");
  adj->add_option("mismatches", o.mismatches_in, "Mismatch JSON-lines from `eval --mismatches`")
      ->required()
      ->check(CLI::ExistingFile);
  adj->add_option("--dump", o.dump_in, "Dump file");
  adj->add_option("-o,--output", o.output, "Adjudication JSON-lines (default stdout)");
  adj->add_option("--distribution", o.distribution_out, "Label distribution JSON to write");
  add_provider_flags(adj, o);

  auto* cmp = app.add_subcommand("compare-export", "Side-by-side file for the comparator");
  cmp->add_option("run_a", o.run_a, "Results of system A")->required()->check(CLI::ExistingFile);
  cmp->add_option("run_b", o.run_b, "Results of system B")->required()->check(CLI::ExistingFile);
  cmp->add_option("--dump", o.dump_in, "Dump file");
  cmp->add_option("--name-a", o.name_a, "Display name of system A");
  cmp->add_option("--name-b", o.name_b, "Display name of system B");
  cmp->add_option("-o,--output", o.output, "Output file (default stdout)");

  std::vector<std::string> argv_store{"ontolink"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitInvalid;
  }

  try {
    if (*ingest) return cmd_ingest(o, out, err);
    if (*index) return cmd_index(o, out, err);
    if (*link_cmd) return cmd_link(o, out, err);
    if (*eval) return cmd_eval(o, out, err);
    if (*adj) return cmd_adjudicate(o, out, err);
    if (*cmp) return cmd_compare_export(o, out, err);
  } catch (const ProviderError& e) {
    err << "error: " << e.what() << '\n';
    return kExitPartial;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace ontolink::app
