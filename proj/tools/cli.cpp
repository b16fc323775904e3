#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "mdms/construction.hpp"
#include "mdms/errors.hpp"
#include "mdms/json_io.hpp"
#include "mdms/modarith.hpp"
#include "mdms/search.hpp"
#include "mdms/setops.hpp"
#include "mdms/verify.hpp"

namespace mdms::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::string output_path;
    bool pretty = false;
    int threads = 1;
    std::uint64_t cap = kGroupSizeCap;

    // Run manifest bookkeeping.
    std::vector<std::string> command;
    std::map<std::string, std::string> config;
    std::vector<std::pair<std::string, std::string>> input_hashes;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    JsonStyle style() const { return JsonStyle{pretty}; }
};

std::string read_file(Context& ctx, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string bytes = buffer.str();
    ctx.input_hashes.emplace_back(path, content_hash(bytes));
    return bytes;
}

/// Inline JSON (starts with '[' or '{') or a path to a file.
std::string read_inline_or_file(Context& ctx, const std::string& arg) {
    if (!arg.empty() && (arg[0] == '[' || arg[0] == '{')) return arg;
    return read_file(ctx, arg);
}

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buffer;
}

void write_manifest(Context& ctx) {
    Json m;
    m["format"] = kManifestFormat;
    m["command"] = ctx.command;
    Json config = Json::object();
    for (const auto& [key, value] : ctx.config) config[key] = value;
    m["config"] = std::move(config);
    Json inputs = Json::object();
    for (const auto& [path, hash] : ctx.input_hashes) inputs[path] = hash;
    m["inputs"] = std::move(inputs);
    m["outputs"] = ctx.outputs;
    m["versions"] = Json{{"mdms", kVersion},
                         {"state", kStateFormat},
                         {"certificate", kCertFormat},
                         {"search", kSearchFormat}};
    m["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - ctx.started)
            .count();
    m["timestamp"] = iso_timestamp();

    std::string path = ctx.output_path + ".manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << m.dump(2) << "\n";
}

/// Artifact sink: --output writes the file (plus a manifest); otherwise
/// the artifact goes to stdout.
void emit(Context& ctx, const std::string& artifact) {
    if (ctx.output_path.empty()) {
        ctx.out << artifact << "\n";
        return;
    }
    std::ofstream out(ctx.output_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + ctx.output_path + "'");
    out << artifact << "\n";
    ctx.outputs.push_back(ctx.output_path);
    write_manifest(ctx);
}

std::uint64_t parse_u64(const std::string& text) {
    try {
        std::size_t used = 0;
        std::uint64_t value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::logic_error&) {
        throw SpecError("cannot parse integer '" + text + "'");
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

/// "7" -> Z/7Z; "5^3" -> F_5 vector space of dimension 3.
std::vector<ModuleSpec> parse_modules(const std::string& text) {
    std::vector<ModuleSpec> out;
    for (const std::string& item : split_list(text)) {
        auto caret = item.find('^');
        try {
            if (caret == std::string::npos) {
                out.push_back(cyclic_module(std::stoull(item)));
            } else {
                out.push_back(vector_space_module(
                    std::stoull(item.substr(0, caret)),
                    static_cast<std::uint32_t>(std::stoul(item.substr(caret + 1)))));
            }
        } catch (const std::logic_error&) {
            throw SpecError("cannot parse module size '" + item + "'");
        }
    }
    return out;
}

void check_cli_cap(const Context& ctx, std::uint64_t total) {
    if (total > ctx.cap)
        throw CapError("group size " + std::to_string(total) + " exceeds the cap of " +
                       std::to_string(ctx.cap));
}

// ------------------------------------------------------------ subcommands

int run_mstd(Context& ctx, const std::string& set_arg) {
    IntSet A = int_set_from_json(read_inline_or_file(ctx, set_arg));
    IntSet sums = int_sumset(A);
    IntSet diffs = int_difference(A);
    Json j;
    j["set"] = A;
    j["sumset_size"] = sums.size();
    j["difference_set_size"] = diffs.size();
    j["class"] = to_string(mstd_classify(A));
    j["sumset"] = sums;
    j["difference_set"] = diffs;
    emit(ctx, j.dump(ctx.pretty ? 2 : -1));
    return 0;
}

int run_sumset(Context& ctx, int h, const std::string& set_arg) {
    GroupSet A = group_set_from_json(read_inline_or_file(ctx, set_arg));
    check_cli_cap(ctx, A.group_size());
    GroupSet S = h_fold_sumset(A, h);
    emit(ctx, group_set_to_json(S, ctx.style()));
    return 0;
}

int run_pairs(Context& ctx, bool count_only, int h, std::uint64_t n, const std::string& spec_arg,
              const std::string& state_arg, std::optional<int> level) {
    GroupSpecPtr spec;
    if (!state_arg.empty()) {
        ConstructionState state = state_from_json(read_file(ctx, state_arg));
        spec = state.spec;
        h = state.h;
    } else if (!spec_arg.empty()) {
        spec = group_spec_from_json(read_inline_or_file(ctx, spec_arg));
        h = spec->h();
    }
    std::uint64_t group_size = spec ? spec->total_size() : n;
    if (group_size == 0) throw SpecError("pairs needs --n, --spec or --state");
    if (h < 1) throw SpecError("pairs needs --h (or a spec/state that carries it)");

    Json j;
    j["group_size"] = group_size;
    j["h"] = h;
    if (level) j["level"] = *level;
    j["count"] = count_admissible_pairs(group_size, h, level).str();
    if (!count_only) {
        if (!level) throw SpecError("enumerating pairs requires --level");
        // With a spec in hand, elements print as coordinate arrays; a bare
        // --n enumeration falls back to raw indices.
        Json pairs = Json::array();
        for (const AdmissiblePair& pair : enumerate_admissible_pairs(group_size, h, *level)) {
            Json support = Json::array();
            for (const PairEntry& e : pair.support) {
                Json entry;
                if (spec) {
                    entry["element"] = Json::parse(element_to_json(*spec, e.element));
                } else {
                    entry["element"] = e.element;
                }
                entry["alpha"] = e.alpha;
                entry["beta"] = e.beta;
                support.push_back(std::move(entry));
            }
            pairs.push_back(Json{{"support", std::move(support)}});
        }
        j["pairs"] = std::move(pairs);
    }
    emit(ctx, j.dump(ctx.pretty ? 2 : -1));
    return 0;
}

int run_construct(Context& ctx, int h, const std::string& epsilon_arg, const std::string& levels_arg,
                  const std::string& force_size_arg, bool full_inductive,
                  std::uint64_t restricted_pairs, const std::string& step_sizes_arg) {
    EpsilonSchedule schedule;
    Rational epsilon = parse_rational(epsilon_arg);
    if (levels_arg.empty()) {
        schedule = default_schedule(h, epsilon);
    } else {
        schedule.epsilon = epsilon;
        for (const std::string& level : split_list(levels_arg))
            schedule.levels.push_back(parse_rational(level));
        schedule.validate();
    }

    std::optional<std::vector<ModuleSpec>> override_modules;
    bool force = false;
    if (!force_size_arg.empty()) {
        override_modules = parse_modules(force_size_arg);
        force = true;
    }

    ConstructionState state = build_initial(h, schedule, override_modules, force);
    check_cli_cap(ctx, state.spec->total_size());
    for (const std::string& taint : state.taints)
        ctx.err << "warning: initial modules are tainted '" << taint << "'\n";

    if (full_inductive && h > 1) {
        // The full pair set is astronomically large for any real h; report
        // the exact numbers and refuse to materialize.
        const std::uint64_t n_k = state.spec->total_size();
        BigInt n = count_admissible_pairs(n_k, h, state.k + 1);
        Rational bound = required_module_bound(n, schedule, state.k);
        std::uint64_t prime = choose_module_size(bound, h);
        Json j;
        j["stage"] = state.k;
        j["group_size"] = n_k;
        j["next_level"] = state.k + 1;
        j["full_pair_count"] = n.str();
        j["required_module_bound"] = rational_to_string(bound);
        j["smallest_admissible_prime"] = prime;
        j["symbolic_next_size"] = std::to_string(n_k) + " * " + std::to_string(prime) + "^" + n.str();
        emit(ctx, j.dump(ctx.pretty ? 2 : -1));
        ctx.err << "error: materializing W_" << state.k + 1 << " needs " << n.str()
                << " new modules; the group size exceeds the cap of " << ctx.cap
                << " elements\n";
        return 2;
    }

    if (restricted_pairs > 0) {
        std::vector<std::uint64_t> step_sizes;
        for (const ModuleSpec& m : parse_modules(step_sizes_arg)) {
            if (m.kind != ModuleSpec::Kind::Cyclic)
                throw SpecError("step sizes must be cyclic moduli");
            step_sizes.push_back(m.modulus);
        }
        while (state.k < h) {
            std::vector<AdmissiblePair> pairs = first_admissible_pairs(
                state.spec->total_size(), h, state.k + 1, restricted_pairs);
            if (pairs.empty()) throw SpecError("no admissible pairs at the requested level");
            std::vector<std::uint64_t> sizes = step_sizes;
            if (sizes.empty())
                sizes.assign(pairs.size(), choose_module_size(Rational(0), h));
            if (sizes.size() != pairs.size())
                throw SpecError("--step-sizes must list exactly --pairs sizes");
            state = inductive_step(state, std::move(pairs), std::move(sizes));
            check_cli_cap(ctx, state.spec->total_size());
        }
        if (state.restricted)
            ctx.err << "warning: restricted pair subset; the epsilon guarantee is waived\n";
    }

    emit(ctx, state_to_json(state, ctx.style()));
    return 0;
}

int run_verify(Context& ctx, const std::string& state_arg, const std::string& check,
               std::optional<int> level, const std::string& sizes_arg, const std::string& target_arg,
               const std::string& epsilon_arg) {
    std::optional<ConstructionState> state;
    if (!state_arg.empty()) {
        state = state_from_json(read_file(ctx, state_arg));
        check_cli_cap(ctx, state->spec->total_size());
    }
    std::optional<Rational> epsilon;
    if (!epsilon_arg.empty()) epsilon = parse_rational(epsilon_arg);

    auto need_state = [&]() -> const ConstructionState& {
        if (!state) throw SpecError("check '" + check + "' needs --state");
        return *state;
    };

    std::vector<Certificate> certs;
    if (check == "all") {
        certs = check_all(need_state());
    } else if (check == "subtractive_basis") {
        certs.push_back(check_subtractive_basis(need_state()));
    } else if (check == "level_bound") {
        const ConstructionState& s = need_state();
        certs.push_back(check_level_bound(s, level.value_or(s.k)));
    } else if (check == "lemma1") {
        std::vector<std::uint64_t> sizes;
        for (const std::string& item : split_list(sizes_arg)) sizes.push_back(parse_u64(item));
        if (sizes.empty() && state) {
            ConstructionState first = *state;
            while (has_previous_stage(first)) first = previous_state(first);
            for (const ModuleSpec& m : first.spec->modules()) sizes.push_back(m.size());
        }
        if (sizes.empty()) throw SpecError("lemma1 needs --sizes (or --state)");
        std::vector<std::uint64_t> target(sizes.size(), 0);
        std::vector<std::string> items = split_list(target_arg);
        for (std::size_t i = 0; i < items.size() && i < target.size(); ++i)
            target[i] = parse_u64(items[i]);
        certs.push_back(check_lemma1(sizes, target, epsilon));
    } else if (check == "structural") {
        const ConstructionState& s = need_state();
        ConstructionState prev = previous_state(s);
        certs.push_back(check_structural_lemma(s, level_set(prev, prev.k)));
    } else if (check == "pi_j_zero") {
        certs.push_back(check_pi_j_zero(need_state()));
    } else if (check == "projection") {
        const ConstructionState& s = need_state();
        certs.push_back(check_projection_A(previous_state(s), s));
    } else if (check == "final") {
        certs.push_back(check_final(need_state()));
    } else {
        throw SpecError("unknown check '" + check + "'");
    }

    emit(ctx, certificates_to_json(certs, ctx.style()));
    for (const Certificate& cert : certs) {
        ctx.err << to_string(cert.claim) << ": " << (cert.pass ? "pass" : "FAIL");
        if (cert.tainted()) {
            ctx.err << " (tainted:";
            for (const std::string& t : cert.taints) ctx.err << " " << t;
            ctx.err << ")";
        }
        ctx.err << "\n";
    }
    return any_untainted_failure(certs) ? 1 : 0;
}

int run_search(Context& ctx, std::uint64_t p, int h, bool exhaustive, bool randomized,
               std::uint64_t seed, std::uint64_t iterations, const std::string& epsilon_arg) {
    if (exhaustive && randomized) throw SpecError("choose one of --exhaustive / --random");
    SearchReport report;
    if (randomized) {
        Rational epsilon = epsilon_arg.empty() ? Rational(0) : parse_rational(epsilon_arg);
        report = randomized_search(p, h, epsilon, seed, iterations);
    } else {
        report = exhaustive_search(p, h, ctx.threads);
    }
    emit(ctx, search_report_to_json(report, ctx.style()));
    ctx.err << "examined " << report.sets_examined << " sets in " << report.wall_time_ms << " ms\n";
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{out, err};
    ctx.command.push_back("mdms");
    for (const std::string& a : args) ctx.command.push_back(a);

    CLI::App app{"more differences than multiple sums: set arithmetic, the inductive"
                 " construction, certificates and search over finite abelian groups"};
    app.name("mdms");
    app.require_subcommand(1);
    // --h is a domain flag here, so help loses its usual short name.
    app.set_help_flag("--help", "print usage");
    app.add_option("--output", ctx.output_path, "write the JSON artifact here (plus a run manifest)");
    app.add_flag("--pretty", ctx.pretty, "indented JSON with coordinate element lists");
    app.add_option("--threads", ctx.threads, "worker threads for partitionable subcommands")
        ->check(CLI::Range(1, 1024));
    app.add_option("--cap", ctx.cap, "lower the group-size cap (default 2^26)")
        ->check(CLI::Range(std::uint64_t{1}, kGroupSizeCap));

    // mstd
    std::string mstd_set;
    CLI::App* mstd = app.add_subcommand("mstd", "classify an integer set as MSTD/balanced/MDTS");
    mstd->set_help_flag("--help", "print usage");
    mstd->fallthrough();
    mstd->add_option("--set", mstd_set, "JSON array of integers, inline or a file path")->required();

    // sumset
    int sum_h = 1;
    std::string sum_set;
    CLI::App* sum = app.add_subcommand("sumset", "h-fold sumset of a group set");
    sum->set_help_flag("--help", "print usage");
    sum->fallthrough();
    sum->add_option("--h", sum_h, "fold count h")->required()->check(CLI::PositiveNumber);
    sum->add_option("--set", sum_set, "group-set JSON, inline or a file path")->required();

    // pairs
    bool pairs_count = false;
    int pairs_h = 0;
    std::uint64_t pairs_n = 0;
    std::string pairs_spec, pairs_state;
    std::optional<int> pairs_level;
    CLI::App* pairs = app.add_subcommand("pairs", "count or enumerate admissible pairs");
    pairs->set_help_flag("--help", "print usage");
    pairs->fallthrough();
    pairs->add_flag("--count", pairs_count, "count only");
    pairs->add_option("--h", pairs_h, "weight h");
    pairs->add_option("--n", pairs_n, "group size");
    pairs->add_option("--spec", pairs_spec, "group-spec JSON, inline or a file path");
    pairs->add_option("--state", pairs_state, "construction-state file");
    int pairs_level_raw = 0;
    CLI::Option* pairs_level_opt = pairs->add_option("--level", pairs_level_raw, "exact level");

    // construct
    int cons_h = 1;
    std::string cons_epsilon = "9/10", cons_levels, cons_force, cons_step_sizes;
    bool cons_full = false;
    std::uint64_t cons_pairs = 0;
    CLI::App* cons = app.add_subcommand("construct", "build (W_k, f_k) states");
    cons->set_help_flag("--help", "print usage");
    cons->fallthrough();
    cons->add_option("--h", cons_h, "sumset fold count h")->required()->check(CLI::PositiveNumber);
    cons->add_option("--epsilon", cons_epsilon, "target density bound as p/q");
    cons->add_option("--levels", cons_levels, "comma-separated schedule e_1,...,e_h (default: uniform grid)");
    cons->add_option("--force-size", cons_force,
                     "override W_1 modules (m or p^dim, comma-separated); waives the size bound");
    cons->add_flag("--full-inductive", cons_full, "report the full inductive step (refuses to materialize)");
    cons->add_option("--pairs", cons_pairs, "restricted steps with the first K pairs per stage");
    cons->add_option("--step-sizes", cons_step_sizes, "module sizes for each restricted step");

    // verify
    std::string ver_state, ver_check = "all", ver_sizes, ver_target, ver_epsilon;
    int ver_level_raw = 0;
    CLI::App* ver = app.add_subcommand("verify", "run certificate checks");
    ver->set_help_flag("--help", "print usage");
    ver->fallthrough();
    ver->add_option("--state", ver_state, "construction-state file");
    ver->add_option("--check", ver_check,
                    "all|subtractive_basis|level_bound|lemma1|structural|pi_j_zero|projection|final");
    CLI::Option* ver_level_opt = ver->add_option("--level", ver_level_raw, "level for level_bound");
    ver->add_option("--sizes", ver_sizes, "lemma1 set sizes, comma-separated");
    ver->add_option("--target", ver_target, "lemma1 target tuple, comma-separated");
    ver->add_option("--epsilon", ver_epsilon, "epsilon for lemma1's strict form");

    // search
    std::uint64_t search_p = 0, search_seed = 0, search_iters = 20000;
    int search_h = 1;
    bool search_exhaustive = false, search_random = false;
    std::string search_epsilon;
    CLI::App* search = app.add_subcommand("search", "hunt small |hA|/p over subtractive bases of Z/pZ");
    search->set_help_flag("--help", "print usage");
    search->fallthrough();
    search->add_option("--p", search_p, "prime modulus")->required();
    search->add_option("--h", search_h, "fold count h")->required()->check(CLI::PositiveNumber);
    search->add_flag("--exhaustive", search_exhaustive, "exhaustive over translation classes (default)");
    search->add_flag("--random", search_random, "seeded hill climbing");
    search->add_option("--seed", search_seed, "RNG seed for --random");
    search->add_option("--iters", search_iters, "evaluation budget for --random");
    search->add_option("--epsilon", search_epsilon, "early-stop density target for --random");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    auto snapshot = [&](const CLI::App& source) {
        for (const auto* option : source.get_options()) {
            if (!option->count()) continue;
            const auto& results = option->results();
            ctx.config[option->get_name()] = results.empty() ? "true" : results.front();
        }
    };
    snapshot(app);
    for (const CLI::App* sub : app.get_subcommands()) {
        ctx.config["subcommand"] = sub->get_name();
        snapshot(*sub);
    }

    if (pairs_level_opt->count()) pairs_level = pairs_level_raw;
    std::optional<int> ver_level;
    if (ver_level_opt->count()) ver_level = ver_level_raw;

    try {
        if (mstd->parsed()) return run_mstd(ctx, mstd_set);
        if (sum->parsed()) return run_sumset(ctx, sum_h, sum_set);
        if (pairs->parsed())
            return run_pairs(ctx, pairs_count, pairs_h, pairs_n, pairs_spec, pairs_state, pairs_level);
        if (cons->parsed())
            return run_construct(ctx, cons_h, cons_epsilon, cons_levels, cons_force, cons_full,
                                 cons_pairs, cons_step_sizes);
        if (ver->parsed())
            return run_verify(ctx, ver_state, ver_check, ver_level, ver_sizes, ver_target, ver_epsilon);
        if (search->parsed())
            return run_search(ctx, search_p, search_h, search_exhaustive, search_random, search_seed,
                              search_iters, search_epsilon);
        err << "error: no subcommand\n";
        return 2;
    } catch (const CapError& e) {
        err << "error (cap): " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        err << "error (budget): " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        err << "error (io): " << e.what() << "\n";
        return 2;
    } catch (const SpecError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace mdms::cli
