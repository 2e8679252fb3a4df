#include "esdp/cli.h"

#include "esdp/errors.h"
#include "esdp/eval.h"
#include "esdp/extractor.h"
#include "esdp/groum.h"
#include "esdp/query.h"
#include "esdp/repository.h"
#include "esdp/seq_miner.h"
#include "esdp/transactions.h"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace esdp {

namespace {

const CLI::Range kAtLeastOne(1LL, std::numeric_limits<long long>::max());

struct Options {
    std::vector<std::string> corpus;
    std::string ext = ".java";
    std::string format = "text";
    std::string out_path;
    std::string repo;
    long long min_support = 2;
    bool adaptive = false;
    std::size_t max_patterns = 50;
    std::size_t max_length = 0;
    std::string label;
    std::string created;
    bool replace = false;
    std::size_t top = 5;
    std::size_t pick = 0;
    std::vector<std::string> vars;
    std::vector<std::string> imports;
    std::string package;
    std::string class_name;
    std::string method_name;
    std::string return_type;
    bool time = false;
    std::string statement;
    std::string granularity = "method";
    long long sigma = 2;
    std::size_t max_size = 6;
    bool dump_graphs = false;
    std::string gold;
    std::string roc;
    std::vector<std::size_t> tops;
};

std::string corpus_label(const Options& o) {
    if (!o.label.empty()) return o.label;
    std::string out;
    for (const auto& c : o.corpus) out += (out.empty() ? "" : ",") + c;
    return out;
}

std::string created_timestamp(const Options& o) {
    if (!o.created.empty()) {
        if (!is_valid_timestamp(o.created)) {
            throw CLI::ValidationError("--created", "expected YYYY-MM-DDTHH:MM:SSZ");
        }
        return o.created;
    }
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        return format_timestamp(std::stoll(epoch));
    }
    auto now = std::chrono::system_clock::now();
    return format_timestamp(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

std::string repo_path(const Options& o) {
    if (!o.repo.empty()) return o.repo;
    if (const char* env = std::getenv("ESDP_REPO"); env && *env) return env;
    return "esdp-repo.xml";
}

ExtractResult extract(const Options& o) {
    std::vector<std::filesystem::path> roots(o.corpus.begin(), o.corpus.end());
    return extract_corpus(discover_sources(roots, o.ext));
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + o.out_path);
    f << text;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

ScopeContext query_context(const Options& o) {
    ScopeContext ctx;
    ctx.package = o.package;
    if (!o.class_name.empty()) ctx.class_name = o.class_name;
    if (!o.method_name.empty()) ctx.method_name = o.method_name;
    ctx.return_type = o.return_type;
    ctx.imports = o.imports;
    for (const auto& v : o.vars) {
        auto colon = v.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == v.size()) {
            throw CLI::ValidationError("--var", "expected name:Type, got " + v);
        }
        ctx.variables[v.substr(0, colon)] = v.substr(colon + 1);
    }
    return ctx;
}

std::string join_elements(const std::vector<ItemKey>& elements, std::size_t limit) {
    std::string s;
    for (std::size_t i = 0; i < elements.size() && i < limit; ++i) s += (i ? " " : "") + elements[i].name;
    if (elements.size() > limit) s += " ...";
    return s;
}

// -- commands ---------------------------------------------------------------

int cmd_extract(const Options& o, std::ostream& out) {
    auto r = extract(o);
    if (o.format == "xml") {
        auto g = o.granularity == "class" ? Granularity::Class : Granularity::Method;
        emit(o, out, transactions_to_xml(build_transactions(r.items, g), corpus_label(o)));
    } else if (o.format == "csv") {
        std::string s = "kind,name,enclosing,line,file\n";
        for (const auto& it : r.items) {
            s += std::string(to_string(it.kind)) + "," + csv_field(it.name) + "," + csv_field(it.enclosing) + "," +
                 std::to_string(it.line) + "," + csv_field(it.file) + "\n";
        }
        emit(o, out, s);
    } else {
        emit(o, out, format_item_dump(r.items));
    }
    return 0;
}

std::vector<SequentialPattern> mine_corpus(const Options& o, SequenceDatabase& db, long long& used_support) {
    auto r = extract(o);
    db = build_sequence_db(r.items, corpus_label(o));
    std::vector<SequentialPattern> patterns;
    if (o.adaptive) {
        patterns = adaptive_mine(db, o.max_patterns, o.max_length);
        used_support = patterns.empty() ? static_cast<long long>(std::max<std::size_t>(db.size(), 1)) : patterns.front().support_count;
        for (const auto& p : patterns) used_support = std::min(used_support, p.support_count);
    } else {
        MiningOptions mo;
        mo.min_support = o.min_support;
        mo.max_length = o.max_length;
        patterns = mine_prefixspan(db, mo);
        used_support = o.min_support;
    }
    return patterns;
}

void report_repo(std::ostream& out, const SequenceDatabase& db, const MinedRepository& repo, const std::string& path) {
    out << "sequences " << db.size() << "\n";
    out << "patterns " << repo.patterns.size() << "\n";
    out << "min-support " << repo.min_support_used << "\n";
    out << "repository " << path << "\n";
}

int cmd_mine(const Options& o, std::ostream& out) {
    SequenceDatabase db;
    long long used = 0;
    auto patterns = mine_corpus(o, db, used);
    MinedRepository repo;
    repo.patterns = std::move(patterns);
    repo.corpus_label = corpus_label(o);
    repo.created_at = created_timestamp(o);
    repo.min_support_used = used;
    normalize_repository(repo);
    std::string path = repo_path(o);
    save_repository(repo, path);
    report_repo(out, db, repo, path);
    return 0;
}

int cmd_update(const Options& o, std::ostream& out) {
    std::string path = repo_path(o);
    MinedRepository existing = load_repository(path);
    SequenceDatabase db;
    long long used = 0;
    auto fresh = mine_corpus(o, db, used);
    auto mode = o.replace ? MergeMode::Replace : MergeMode::Incremental;
    MinedRepository merged = merge_update(existing, fresh, mode);
    merged.created_at = created_timestamp(o);
    merged.min_support_used = o.replace ? used : std::min(existing.min_support_used, used);
    if (!o.label.empty()) merged.corpus_label = o.label;
    save_repository(merged, path);
    report_repo(out, db, merged, path);
    return 0;
}

int cmd_query(const Options& o, std::ostream& out, std::ostream& err, std::istream& in) {
    auto start = std::chrono::steady_clock::now();
    MinedRepository repo = load_repository(repo_path(o));
    UserQuery q = abstract_query(o.statement, query_context(o));
    auto recs = search(q, repo, o.top);
    auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (o.format == "csv") {
        out << "rank,k,support,confidence,ranking,offset,elements\n";
    } else {
        out << "query " << format_key(q.item) << "\n";
        out << std::left << std::setw(6) << "rank" << std::setw(4) << "k" << std::setw(9) << "support"
            << std::setw(12) << "confidence" << std::setw(9) << "ranking" << "elements\n";
    }
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& p = recs[i].pattern;
        std::string sup = format_fixed2(p.support_count, p.db_size);
        std::string conf = format_fixed2(p.support_count, p.prefix_support);
        std::string rank = format_fixed2(p.ranking().num, p.ranking().den);
        if (o.format == "csv") {
            out << i + 1 << "," << p.k() << "," << sup << "," << conf << "," << rank << "," << recs[i].match_offset
                << "," << csv_field(join_elements(p.elements, p.elements.size())) << "\n";
        } else {
            out << std::left << std::setw(6) << i + 1 << std::setw(4) << p.k() << std::setw(9) << sup << std::setw(12)
                << conf << std::setw(9) << rank << join_elements(p.elements, 3) << "\n";
        }
    }
    if (o.time) out << "time_ms " << std::fixed << std::setprecision(2) << elapsed << "\n";
    if (recs.empty()) {
        out << "no recommendations\n";
        return 0;
    }

    std::size_t pick = o.pick;
    if (pick == 0 && isatty(STDIN_FILENO) && &in == &std::cin) {
        err << "select 1-" << recs.size() << ": ";
        std::string line;
        if (std::getline(in, line) && !line.empty()) {
            try {
                pick = std::stoul(line);
            } catch (const std::exception&) {
                pick = 0;
            }
        }
    }
    if (pick == 0) pick = 1;
    if (pick > recs.size()) throw CLI::ValidationError("--pick", "selection out of range 1-" + std::to_string(recs.size()));

    Skeleton sk = render_skeleton(recs[pick - 1], q);
    std::string text = q.raw_statement + "\n" + sk.text();
    if (o.out_path.empty()) {
        if (o.format != "csv") out << "\nskeleton " << pick << "\n" << text;
    } else {
        emit(o, out, text);
    }
    return 0;
}

int cmd_groum(const Options& o, std::ostream& out) {
    auto r = extract(o);
    auto graphs = build_groums(r);
    ExplorerOptions eo;
    eo.sigma = o.sigma;
    eo.max_size = o.max_size;
    auto patterns = patt_explorer(graphs, eo);
    std::ostringstream s;
    if (o.format == "csv") {
        s << "pattern,size,frequency,exact,nodes\n";
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            std::string labels;
            for (const auto& n : patterns[i].representative.nodes) labels += (labels.empty() ? "" : " ") + n.label;
            s << i + 1 << "," << patterns[i].size() << "," << patterns[i].frequency << ","
              << (patterns[i].frequency_exact ? "yes" : "no") << "," << csv_field(labels) << "\n";
        }
        emit(o, out, s.str());
        return 0;
    }
    s << "groums " << graphs.size() << "\n";
    s << "patterns " << patterns.size() << "\n";
    if (o.dump_graphs) {
        for (const auto& g : graphs) s << "\ngraph " << g.origin << "\n" << format_groum(g);
    }
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const auto& p = patterns[i];
        s << "\npattern " << i + 1 << " size " << p.size() << " f " << p.frequency
          << (p.frequency_exact ? "" : " lower-bound") << "\n"
          << format_groum(p.representative);
    }
    emit(o, out, s.str());
    return 0;
}

struct GoldCase {
    std::string statement;
    std::vector<ItemKey> expected;
};

std::vector<GoldCase> read_gold(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read gold file " + path);
    std::vector<GoldCase> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw CLI::ValidationError("--gold", "line " + std::to_string(n) + " has no tab");
        GoldCase c;
        c.statement = line.substr(0, tab);
        std::istringstream keys(line.substr(tab + 1));
        std::string key;
        while (keys >> key) {
            auto parsed = parse_key(key);
            if (!parsed) throw CLI::ValidationError("--gold", "line " + std::to_string(n) + ": bad item " + key);
            c.expected.push_back(*parsed);
        }
        if (c.expected.empty()) throw CLI::ValidationError("--gold", "line " + std::to_string(n) + " has no items");
        out.push_back(std::move(c));
    }
    return out;
}

int cmd_eval(const Options& o, std::ostream& out) {
    MinedRepository repo = load_repository(repo_path(o));
    auto cases = read_gold(o.gold);
    ScopeContext ctx = query_context(o);
    std::vector<std::size_t> tops = o.tops.empty() ? std::vector<std::size_t>{o.top} : o.tops;
    std::size_t widest = *std::max_element(tops.begin(), tops.end());

    std::ostringstream s;
    bool csv = o.format == "csv";
    if (csv) s << "query,matches,seq_precision,seq_recall\n";
    else s << std::left << std::setw(8) << "query" << std::setw(9) << "matches" << std::setw(10) << "seq_p"
           << std::setw(10) << "seq_r" << "statement\n";

    std::vector<ScoredLabel> roc_cases;
    double sum_p = 0, sum_r = 0;
    std::vector<double> top_p(tops.size(), 0), top_r(tops.size(), 0);
    std::set<ItemKey> empty_set;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        UserQuery q = abstract_query(c.statement, ctx);
        auto recs = search(q, repo, widest);
        double p = 0, r = 0;
        if (!recs.empty()) {
            const auto& best = recs.front();
            std::vector<ItemKey> recommended(best.pattern.elements.begin() + static_cast<std::ptrdiff_t>(best.match_offset) + 1,
                                             best.pattern.elements.end());
            if (!recommended.empty()) {
                auto pr = sequence_pr(recommended, c.expected);
                p = pr.precision.value();
                r = pr.recall.value();
            }
            roc_cases.push_back({best.score.value(), p >= 0.5});
        }
        sum_p += p;
        sum_r += r;
        std::set<std::string> relevant;
        for (const auto& k : c.expected) relevant.insert(format_key(k));
        for (std::size_t t = 0; t < tops.size(); ++t) {
            RetrievalOutcome outcome;
            outcome.relevant = relevant;
            std::set<std::string> seen;
            for (std::size_t j = 0; j < recs.size() && j < tops[t]; ++j) {
                const auto& el = recs[j].pattern.elements;
                for (std::size_t e = recs[j].match_offset + 1; e < el.size(); ++e) {
                    std::string key = format_key(el[e]);
                    if (seen.insert(key).second) outcome.retrieved.push_back(key);
                }
            }
            if (!outcome.retrieved.empty()) {
                auto pr = precision_recall(outcome);
                top_p[t] += pr.precision.value();
                top_r[t] += pr.recall.value();
            }
        }
        auto fmt = [](double v) {
            std::ostringstream f;
            f << std::fixed << std::setprecision(2) << v;
            return f.str();
        };
        if (csv) s << i + 1 << "," << recs.size() << "," << fmt(p) << "," << fmt(r) << "\n";
        else s << std::left << std::setw(8) << i + 1 << std::setw(9) << recs.size() << std::setw(10) << fmt(p)
               << std::setw(10) << fmt(r) << c.statement << "\n";
    }
    if (!csv) {
        double n = cases.empty() ? 1.0 : static_cast<double>(cases.size());
        s << std::fixed << std::setprecision(2);
        s << "\nmean seq_p " << sum_p / n << " seq_r " << sum_r / n << "\n";
        for (std::size_t t = 0; t < tops.size(); ++t) {
            s << "top " << tops[t] << " precision " << top_p[t] / n << " recall " << top_r[t] / n << "\n";
        }
    }
    bool has_pos = std::any_of(roc_cases.begin(), roc_cases.end(), [](const ScoredLabel& c) { return c.positive; });
    bool has_neg = std::any_of(roc_cases.begin(), roc_cases.end(), [](const ScoredLabel& c) { return !c.positive; });
    if (has_pos && has_neg) {
        auto pts = roc_points(roc_cases, score_thresholds(roc_cases));
        if (!csv) s << "auc " << std::fixed << std::setprecision(4) << auc(pts) << "\n";
        if (!o.roc.empty()) {
            std::ofstream f(o.roc, std::ios::binary | std::ios::trunc);
            if (!f) throw std::runtime_error("cannot write " + o.roc);
            f << "fpr,tpr\n" << std::fixed << std::setprecision(6);
            for (const auto& pt : pts) f << pt.fpr.value() << "," << pt.tpr.value() << "\n";
        }
    } else if (!csv) {
        s << "auc n/a (needs positive and negative cases)\n";
    }
    emit(o, out, s.str());
    return 0;
}

void add_corpus(CLI::App* cmd, Options& o) {
    cmd->add_option("--corpus", o.corpus, "Source directories or files (repeatable)")->required()->allow_extra_args(false);
    cmd->add_option("--ext", o.ext, "Source file extension")->capture_default_str();
}

void add_context(CLI::App* cmd, Options& o) {
    cmd->add_option("--var", o.vars, "Context variable as name:Type (repeatable)")->allow_extra_args(false);
    cmd->add_option("--import", o.imports, "Import visible to the query (repeatable)")->allow_extra_args(false);
    cmd->add_option("--package", o.package, "Package of the query context");
    cmd->add_option("--class", o.class_name, "Enclosing class name");
    cmd->add_option("--method", o.method_name, "Enclosing method name");
    cmd->add_option("--return-type", o.return_type, "Return type of the enclosing method");
}

void add_mining(CLI::App* cmd, Options& o) {
    add_corpus(cmd, o);
    cmd->add_option("--repo", o.repo, "Repository file (default $ESDP_REPO or esdp-repo.xml)");
    cmd->add_option("--min-support", o.min_support, "Minimum support count")->capture_default_str()->check(kAtLeastOne);
    cmd->add_flag("--adaptive", o.adaptive, "Choose the minimum support from --max-patterns");
    cmd->add_option("--max-patterns", o.max_patterns, "Pattern budget for --adaptive")->capture_default_str()->check(kAtLeastOne);
    cmd->add_option("--max-length", o.max_length, "Longest pattern to mine (0 = unbounded)")->capture_default_str();
    cmd->add_option("--label", o.label, "Corpus label stored in the repository");
    cmd->add_option("--created", o.created, "Creation timestamp (default $SOURCE_DATE_EPOCH or now)");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::istream& in) {
    CLI::App app{"Mine API usage patterns from Java sources and recommend code skeletons", "esdp"};
    app.require_subcommand(1);
    Options o;

    auto* extract_cmd = app.add_subcommand("extract", "Dump abstracted items of a corpus");
    add_corpus(extract_cmd, o);
    extract_cmd->add_option("--format", o.format, "text, csv, or xml (transactions)")
        ->check(CLI::IsMember({"text", "csv", "xml"}))
        ->capture_default_str();
    extract_cmd->add_option("--granularity", o.granularity, "Transaction blocks for xml: class or method")
        ->check(CLI::IsMember({"class", "method"}))
        ->capture_default_str();
    extract_cmd->add_option("--out", o.out_path, "Write to a file instead of standard output");

    auto* mine_cmd = app.add_subcommand("mine", "Mine sequential patterns into a repository");
    add_mining(mine_cmd, o);

    auto* update_cmd = app.add_subcommand("update", "Merge freshly mined patterns into an existing repository");
    add_mining(update_cmd, o);
    update_cmd->add_flag("--replace", o.replace, "Drop patterns not found by the fresh mining run");

    auto* query_cmd = app.add_subcommand("query", "Recommend pattern sequences for a statement");
    query_cmd->add_option("statement", o.statement, "Java statement")->required();
    query_cmd->add_option("--repo", o.repo, "Repository file (default $ESDP_REPO or esdp-repo.xml)");
    query_cmd->add_option("--top", o.top, "Number of recommendations")->capture_default_str()->check(kAtLeastOne);
    query_cmd->add_option("--pick", o.pick, "Recommendation to render (default: prompt when interactive, else 1)")
        ->check(kAtLeastOne);
    query_cmd->add_option("--format", o.format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    query_cmd->add_option("--out", o.out_path, "Write the skeleton to a file");
    query_cmd->add_flag("--time", o.time, "Print query latency");
    add_context(query_cmd, o);

    auto* groum_cmd = app.add_subcommand("groum", "Mine graph-based usage patterns");
    add_corpus(groum_cmd, o);
    groum_cmd->add_option("--sigma", o.sigma, "Minimum pattern frequency")->capture_default_str()->check(kAtLeastOne);
    groum_cmd->add_option("--max-size", o.max_size, "Largest pattern size (0 = unbounded)")->capture_default_str();
    groum_cmd->add_flag("--dump-graphs", o.dump_graphs, "Print every method graph");
    groum_cmd->add_option("--format", o.format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    groum_cmd->add_option("--out", o.out_path, "Write to a file instead of standard output");

    auto* eval_cmd = app.add_subcommand("eval", "Score recommendations against a gold file");
    eval_cmd->add_option("--repo", o.repo, "Repository file (default $ESDP_REPO or esdp-repo.xml)");
    eval_cmd->add_option("--gold", o.gold, "Lines of: statement TAB KIND#name ...")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--top", o.tops, "Top-N cut-offs (repeatable)")->allow_extra_args(false);
    eval_cmd->add_option("--roc", o.roc, "Write ROC points as CSV");
    eval_cmd->add_option("--format", o.format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    eval_cmd->add_option("--out", o.out_path, "Write to a file instead of standard output");
    add_context(eval_cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*extract_cmd) return cmd_extract(o, out);
        if (*mine_cmd) return cmd_mine(o, out);
        if (*update_cmd) return cmd_update(o, out);
        if (*query_cmd) return cmd_query(o, out, err, in);
        if (*groum_cmd) return cmd_groum(o, out);
        if (*eval_cmd) return cmd_eval(o, out);
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.name() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << app.help();
    return 2;
}

} // namespace esdp
