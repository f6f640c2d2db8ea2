#include <picardkit/report.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

using namespace picardkit;
using nlohmann::json;

namespace {

constexpr const char* kExitCodes = R"(Exit codes:
  0  success
  1  internal error
  2  invalid input (unreadable or malformed files, parse errors, missing degree budget)
  3  budget exceeded (point-count evaluation budget)
  4  undecided (rank search below the Tate bound, ambiguous functional-equation sign)
  5  mathematical inconsistency (no solution, non-integral coefficients, inconsistent table,
     improper intersection, unclassifiable factor, hypothesis violation, rank mismatch,
     relation violation, invalid certificate)
Environment: PICARDKIT_CACHE overrides --cache-dir.)";

struct Emitter {
    std::string command;
    bool timing = true;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void ok(json r) const {
        if (timing)
            r["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
        std::cout << r.dump(2) << "\n";
    }

    int error(const std::string& kind, const std::string& message, int code) const {
        std::cout << json{{"schema", report::kSchema}, {"command", command}, {"error", {{"kind", kind}, {"message", message}}}}.dump(2)
                  << "\n";
        std::cerr << "picardkit " << command << ": " << message << "\n";
        return code;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zeta functions, Tate bounds and Picard-rank certificates over finite fields"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    report::RunConfig cfg;
    std::string cache_dir, checkpoint;
    bool no_timing = false, quiet = false;
    app.add_option("--cache-dir", cache_dir, "Directory for the persistent point-count cache");
    app.add_option("--budget", cfg.count_budget, "Maximum outer-coordinate evaluations per point count")->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads for point counting")->capture_default_str()->check(CLI::Range(1u, 256u));
    app.add_option("--precision-bits", cfg.precision_bits, "Largest float precision for weight certification")
        ->capture_default_str()
        ->check(CLI::IsMember({64u, 128u, 256u, 512u, 1024u, 2048u}));
    app.add_option("--checkpoint", checkpoint, "Resumable state file for the rank search");
    app.add_flag("--no-timing", no_timing, "Omit wall-clock timing from the report");
    app.add_flag("--quiet", quiet, "Suppress heartbeat lines on stderr");

    std::string spec_file, zeta_file, cycles_file, table_file, family_file, trace_file;
    unsigned n = 1, rounds = 12, tasks = 8, p_rank = 1;
    std::optional<unsigned> p_tate, degree;
    bool demo = false;

    auto* count = app.add_subcommand("count", "Point counts N_1..N_n");
    count->add_option("--spec", spec_file, "Variety specification (JSON)")->required();
    count->add_option("--n", n, "Largest extension degree")->required();

    auto* zeta = app.add_subcommand("zeta", "Zeta function from point counts");
    zeta->add_option("--spec", spec_file)->required();

    auto* betti = app.add_subcommand("betti", "Betti numbers and weight decomposition");
    betti->add_option("--spec", spec_file)->required();

    auto* tate = app.add_subcommand("tate-bound", "Upper bound dim V_mu for codimension p (all p by default)");
    tate->add_option("--spec", spec_file)->required();
    tate->add_option("--p", p_tate, "Codimension");

    auto* rank = app.add_subcommand("rank", "Certify the cycle-class rank against the Tate bound");
    auto* rz = rank->add_option("--zeta", zeta_file, "Zeta function JSON, or a zeta report");
    auto* rs = rank->add_option("--spec", spec_file, "Variety specification; computes the zeta function");
    rz->excludes(rs);
    rank->add_option("--cycles", cycles_file, "Cycle data (JSON)")->required();
    rank->add_option("--p", p_rank, "Codimension")->capture_default_str();

    auto* torsion = app.add_subcommand("torsion", "Torsion of integral cohomology from a size table");
    torsion->add_option("--table", table_file, "Size table (JSON)")->required();
    torsion->add_option("--i", degree, "Cohomological degree (all by default)");

    auto* galrank = app.add_subcommand("galois-rank", "Upper bounds on the invariant rank of a Galois module family");
    galrank->add_option("--family", family_file, "Module family (JSON)")->required();

    auto* dove = app.add_subcommand("dovetail", "Fair interleaving of semidecision procedures");
    dove->add_flag("--demo", demo, "Run the built-in demo family")->required();
    dove->add_option("--rounds", rounds, "Rounds to run")->capture_default_str();
    dove->add_option("--tasks", tasks, "Tasks in the demo family")->capture_default_str();
    dove->add_option("--trace", trace_file, "Write the event trace as NDJSON");

    CLI11_PARSE(app, argc, argv);

    Emitter out;
    out.command = app.get_subcommands().front()->get_name();
    out.timing = !no_timing;
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
    if (!quiet) cfg.heartbeat = [](const std::string& s) { std::cerr << "[picardkit] " << s << std::endl; };

    try {
        auto spec = [&] { return report::variety_from_json(report::read_json_file(spec_file)); };
        if (*count) out.ok(report::cmd_count(spec(), n, cfg));
        else if (*zeta) out.ok(report::cmd_zeta(spec(), cfg));
        else if (*betti) out.ok(report::cmd_betti(spec(), cfg));
        else if (*tate) out.ok(report::cmd_tate(spec(), p_tate, cfg));
        else if (*rank) {
            json z;
            if (!zeta_file.empty()) z = report::read_json_file(zeta_file);
            else if (!spec_file.empty()) z = report::cmd_zeta(spec(), cfg);
            else return out.error("invalid-input", "rank needs --zeta or --spec", 2);
            bool halted = false;
            out.ok(report::cmd_rank(z, report::read_json_file(cycles_file), p_rank, cfg, &halted));
            if (!halted) {
                std::cerr << "picardkit rank: lower bound has not reached the Tate bound yet\n";
                return report::exit_code(ErrorKind::undecided);
            }
        } else if (*torsion) out.ok(report::cmd_torsion(report::read_json_file(table_file), degree));
        else if (*galrank) out.ok(report::cmd_galrank(report::read_json_file(family_file)));
        else if (*dove) {
            std::ofstream trace;
            if (!trace_file.empty()) {
                trace.open(trace_file);
                if (!trace) return out.error("invalid-input", "cannot write " + trace_file, 2);
            }
            out.ok(report::cmd_dovetail_demo(rounds, tasks, trace_file.empty() ? nullptr : &trace));
        }
    } catch (const Error& e) {
        return out.error(to_string(e.kind()), e.message(), report::exit_code(e.kind()));
    } catch (const nlohmann::json::exception& e) {
        return out.error("invalid-input", e.what(), 2);
    } catch (const std::exception& e) {
        return out.error("internal", e.what(), 1);
    }
    return 0;
}
