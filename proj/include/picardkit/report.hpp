#pragma once

// Command implementations behind the CLI. Each returns a report fragment; the
// numbers in it come straight from library calls.

#include "counting.hpp"
#include "dovetail.hpp"
#include "galmod.hpp"
#include "lattice.hpp"
#include "polysys.hpp"
#include "weil.hpp"
#include "zeta.hpp"
#include "zfactor.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace picardkit::report {

using nlohmann::json;

inline constexpr const char* kSchema = "picardkit-report/1";

/// Exit status for each failure kind.
inline int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::invalid_input:
    case ErrorKind::missing_budget:
    case ErrorKind::division_by_zero: return 2;
    case ErrorKind::budget_exceeded: return 3;
    case ErrorKind::undecided: return 4;
    default: return 5;
    }
}

struct RunConfig {
    std::optional<std::filesystem::path> cache_dir;
    std::uint64_t count_budget = std::uint64_t(1) << 34;
    unsigned threads = 1;
    unsigned precision_bits = 1024;
    std::optional<std::filesystem::path> checkpoint;
    std::function<void(const std::string&)> heartbeat;
};

inline json int_json(const Int& v) {
    if (v >= Int(std::numeric_limits<long long>::min()) && v <= Int(std::numeric_limits<long long>::max()))
        return static_cast<long long>(v);
    return v.str();
}

inline std::string digest(const json& inputs) { return detail::hex64(detail::fnv1a(inputs.dump())); }

inline json envelope(const std::string& command, const json& inputs) {
    return {{"schema", kSchema}, {"command", command}, {"inputsDigest", digest(inputs)}};
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::invalid_input, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::invalid_input, path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Field and variety specifications

inline FieldDesc field_from_json(const json& j) {
    const auto p = j.at("p").get<std::uint32_t>();
    const auto e = j.value("e", 1u);
    require(is_prime_u64(p), ErrorKind::invalid_input, "field characteristic " + std::to_string(p) + " is not prime");
    require(e >= 1, ErrorKind::invalid_input, "field degree must be positive");
    if (!j.contains("modulus")) return make_field(p, e);
    FieldDesc F;
    F.p = p;
    F.e = e;
    F.modulus = j.at("modulus").get<std::vector<std::uint32_t>>();
    require(F.modulus.size() == e + 1 && F.modulus.back() == 1, ErrorKind::invalid_input, "modulus must be monic of degree e");
    for (auto c : F.modulus) require(c < p, ErrorKind::invalid_input, "modulus coefficient out of range");
    require(is_irreducible(F.modulus, p), ErrorKind::invalid_input, "modulus is reducible");
    return F;
}

inline json to_json(const FieldDesc& F) { return {{"p", F.p}, {"e", F.e}, {"modulus", F.modulus}}; }

struct VarietySpec {
    std::string name;
    FieldDesc field;
    std::size_t ambientDim = 0;
    std::vector<std::string> generators;
    bool assumeSmooth = false;
    bool b1b3Zero = false;
    std::optional<unsigned> budget;
    std::optional<unsigned> hypersurfaceDegree;

    HomIdeal<GaloisField> ideal() const {
        GaloisField K(field);
        std::vector<MultiPoly<GaloisField>> gens;
        for (const auto& g : generators) gens.push_back(parse_poly(K, ambientDim + 1, g));
        return HomIdeal<GaloisField>(K, ambientDim + 1, std::move(gens));
    }
};

inline VarietySpec variety_from_json(const json& j) {
    VarietySpec s;
    s.name = j.value("name", "");
    s.field = field_from_json(j.at("field"));
    s.ambientDim = j.at("ambientDim").get<std::size_t>();
    require(s.ambientDim >= 1 && s.ambientDim + 1 <= kMaxVars, ErrorKind::invalid_input, "ambientDim out of range");
    s.generators = j.value("generators", std::vector<std::string>{});
    const json flags = j.value("flags", json::object());
    s.assumeSmooth = flags.value("assumeSmooth", false);
    s.b1b3Zero = flags.value("b1b3Zero", false);
    if (flags.contains("budget")) s.budget = flags.at("budget").get<unsigned>();
    if (flags.contains("hypersurfaceDegree")) s.hypersurfaceDegree = flags.at("hypersurfaceDegree").get<unsigned>();
    s.ideal();   // parse and homogeneity check
    return s;
}

inline json to_json(const VarietySpec& s) {
    json flags{{"assumeSmooth", s.assumeSmooth}, {"b1b3Zero", s.b1b3Zero}};
    if (s.budget) flags["budget"] = *s.budget;
    if (s.hypersurfaceDegree) flags["hypersurfaceDegree"] = *s.hypersurfaceDegree;
    return {{"name", s.name}, {"field", to_json(s.field)}, {"ambientDim", s.ambientDim}, {"generators", s.generators},
            {"flags", flags}};
}

// ---------------------------------------------------------------------------
// Formatting

inline json poly_json(const ZPoly& p) {
    json a = json::array();
    for (const auto& c : p) a.push_back(int_json(c));
    return a;
}

/// "(1 - T)*(1 - 2*T)^2"; "1" for the constant polynomial 1.
inline std::string factored_string(const ZPoly& P) {
    const auto F = factor_z_poly(P);
    auto factors = F.factors;
    std::sort(factors.begin(), factors.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        std::vector<Int> aa, bb;
        for (const auto& c : a.first) aa.push_back(Int(abs(c)));
        for (const auto& c : b.first) bb.push_back(Int(abs(c)));
        if (aa != bb) return aa < bb;
        return a.first < b.first;
    });
    std::string out;
    if (F.unit != 1) out = F.unit.str();
    for (const auto& [f, m] : factors) {
        if (!out.empty()) out += "*";
        out += "(" + poly_string(f) + ")";
        if (m > 1) out += "^" + std::to_string(m);
    }
    return out.empty() ? "1" : out;
}

inline json factors_json(const ZPoly& P) {
    json a = json::array();
    for (const auto& [f, m] : factor_z_poly(P).factors) a.push_back({{"factor", poly_string(f)}, {"multiplicity", m}});
    return a;
}

inline json zeta_json(const ZetaFunction& Z) {
    json j = picardkit::to_json(Z);
    const std::string num = factored_string(Z.num), den = factored_string(Z.den);
    j["rational"] = num + "/(" + den + ")";
    j["expanded"] = {{"num", poly_string(Z.num)}, {"den", poly_string(Z.den)}};
    j["factored"] = {{"num", factors_json(Z.num)}, {"den", factors_json(Z.den)}};
    const auto fe = functional_equation_check(Z);
    j["functionalEquation"] = {{"holds", fe.holds}, {"sign", fe.sign}};
    return j;
}

inline json counts_json(const CountSeries& s) {
    json v = json::array();
    for (const auto& c : s.counts) v.push_back(int_json(c));
    return {{"q", s.q}, {"varietyHash", s.variety_hash}, {"values", v}};
}

// ---------------------------------------------------------------------------
// count / zeta / betti / tate-bound

inline CountOptions count_options(const RunConfig& cfg) {
    CountOptions o;
    o.budget = cfg.count_budget;
    o.threads = cfg.threads;
    o.progress = cfg.heartbeat;
    return o;
}

inline json cmd_count(const VarietySpec& spec, unsigned n, const RunConfig& cfg) {
    require(n >= 1, ErrorKind::invalid_input, "n must be at least 1");
    auto cache = CountCache::open(cfg.cache_dir);
    const auto s = count_tower(spec.ideal(), n, &cache, count_options(cfg));
    json r = envelope("count", {{"spec", to_json(spec)}, {"n", n}});
    r["counts"] = counts_json(s);
    return r;
}

struct ZetaRun {
    ZetaFunction Z;
    CountSeries counts;
    std::string method;
    json budget;
};

inline ZetaRun compute_zeta(const VarietySpec& spec, const RunConfig& cfg) {
    const auto I = spec.ideal();
    const auto dd = dimension_degree(I);
    require(dd.dimension >= 0, ErrorKind::invalid_input, "the variety is empty");
    const unsigned dim = static_cast<unsigned>(dd.dimension);
    if (!spec.assumeSmooth)
        require(smoothness_check(I), ErrorKind::invalid_input, "variety is singular (Jacobian criterion)");
    auto cache = CountCache::open(cfg.cache_dir);
    const auto opt = count_options(cfg);
    ZetaRun run;
    if (spec.b1b3Zero && dim == 2) {
        unsigned b2;
        if (spec.hypersurfaceDegree) {
            b2 = static_cast<unsigned>(hypersurface_betti(*spec.hypersurfaceDegree, 2)[2]);
            run.budget = {{"b2", b2}, {"source", "hypersurface-formula"}};
        } else if (spec.budget) {
            require(*spec.budget >= 2, ErrorKind::invalid_input, "degree budget must be at least 2");
            b2 = *spec.budget - 2;
            run.budget = {{"b2", b2}, {"source", "user-config"}};
        } else {
            fail(ErrorKind::missing_budget, "surface mode needs a budget or a hypersurface degree");
        }
        run.method = "surface";
        const unsigned m0 = std::max(1u, (b2 + 1) / 2);
        for (unsigned m = m0; m <= std::max(m0, b2); ++m) {
            run.counts = count_tower(I, m, &cache, opt);
            const auto S = reconstruct_surface(run.counts, b2, cfg.precision_bits);
            if (!S.ambiguous()) {
                run.Z = S.candidates.front();
                return run;
            }
        }
        fail(ErrorKind::undecided, "functional-equation sign still ambiguous after " + std::to_string(std::max(m0, b2)) + " counts");
    }
    VarietyDescriptor desc{spec.budget, spec.hypersurfaceDegree, dim};
    const auto B = betti_budget(desc);
    run.budget = {{"B", B.B},
                  {"source", B.source == BudgetSource::user_config ? "user-config" : "hypersurface-formula"}};
    run.method = "pade";
    run.counts = count_tower(I, 2 * B.B, &cache, opt);
    run.Z = reconstruct(run.counts, B, dim);
    return run;
}

inline json zeta_section(const ZetaRun& run) {
    json j = zeta_json(run.Z);
    j["method"] = run.method;
    j["budget"] = run.budget;
    return j;
}

inline json cmd_zeta(const VarietySpec& spec, const RunConfig& cfg) {
    const auto run = compute_zeta(spec, cfg);
    json r = envelope("zeta", {{"spec", to_json(spec)}});
    r["counts"] = counts_json(run.counts);
    r["zeta"] = zeta_section(run);
    return r;
}

inline json betti_json(const WeightClassification& C) {
    json pieces = json::array();
    for (const auto& p : C.pieces)
        pieces.push_back({{"factor", poly_string(p.factor)},
                          {"multiplicity", p.multiplicity},
                          {"weight", p.weight},
                          {"side", p.in_numerator ? "numerator" : "denominator"}});
    return {{"numbers", betti_numbers(C)}, {"pieces", pieces}};
}

inline json tate_json(const TateBound& T) {
    json per = json::array();
    for (const auto& f : T.perFactor) {
        json parts = json::array();
        for (const auto& c : f.cyclotomic.parts) parts.push_back({{"m", c.m}, {"multiplicity", c.multiplicity}});
        per.push_back({{"factor", poly_string(f.factor)},
                       {"multiplicity", f.multiplicity},
                       {"cyclotomicDegree", f.cyclotomic.total},
                       {"cyclotomicParts", parts}});
    }
    return {{"p", T.p}, {"vMu", T.vMu}, {"perFactor", per}};
}

inline json cmd_betti(const VarietySpec& spec, const RunConfig& cfg) {
    const auto run = compute_zeta(spec, cfg);
    json r = envelope("betti", {{"spec", to_json(spec)}});
    r["counts"] = counts_json(run.counts);
    r["zeta"] = zeta_section(run);
    r["betti"] = betti_json(classify_weights(run.Z, cfg.precision_bits));
    return r;
}

/// p = nullopt reports every codimension 0..dim.
inline json cmd_tate(const VarietySpec& spec, std::optional<unsigned> p, const RunConfig& cfg) {
    const auto run = compute_zeta(spec, cfg);
    const auto C = classify_weights(run.Z, cfg.precision_bits);
    json inputs{{"spec", to_json(spec)}};
    if (p) inputs["p"] = *p;
    json r = envelope("tate-bound", inputs);
    r["counts"] = counts_json(run.counts);
    r["zeta"] = zeta_section(run);
    r["betti"] = betti_json(C);
    json bounds = json::array();
    for (unsigned k = 0; k <= run.Z.dim; ++k)
        if (!p || *p == k) bounds.push_back(tate_json(dim_v_mu(C, run.Z.q, run.Z.dim, k)));
    require(!bounds.empty(), ErrorKind::invalid_input, "codimension exceeds the dimension");
    r["tate"] = bounds;
    return r;
}

// ---------------------------------------------------------------------------
// rank

struct CycleData {
    std::vector<std::string> basis;        // Y
    std::vector<std::string> rowNames;     // z_j
    IntMatrix pairings;                    // rows z_j, columns Y
    std::vector<IntMatrix> action;         // on coordinates of Y
    std::vector<std::vector<std::size_t>> relations;
    std::vector<std::pair<std::string, std::vector<Int>>> candidates;
    std::optional<std::size_t> rho;
    bool computed = false;                 // pairings came from the intersection computation
};

inline IntMatrix action_matrix(const json& g, std::size_t k) {
    require(g.is_array() && g.size() == k, ErrorKind::invalid_input, "action generator has wrong size");
    if (!g.empty() && g.front().is_array()) return int_matrix_from_json(g);
    // permutation: basis cycle j goes to perm[j]
    IntMatrix A(k, k);
    std::vector<bool> hit(k, false);
    for (std::size_t j = 0; j < k; ++j) {
        const auto i = g[j].get<std::size_t>();
        require(i < k && !hit[i], ErrorKind::invalid_input, "action generator is not a permutation");
        hit[i] = true;
        A(i, j) = 1;
    }
    return A;
}

/// Intersection numbers z_j . y_i on the surface from the ideals of the cycles.
inline IntMatrix compute_pairings(const json& j, const std::vector<std::string>& rows, const std::vector<std::string>& cols,
                                  const std::function<void(const std::string&)>& heartbeat) {
    GaloisField K(field_from_json(j.at("field")));
    const std::size_t nv = j.at("ambientDim").get<std::size_t>() + 1;
    auto ideal_of = [&](const std::vector<std::string>& gens) {
        std::vector<MultiPoly<GaloisField>> ps;
        for (const auto& g : gens) ps.push_back(parse_poly(K, nv, g));
        return HomIdeal<GaloisField>(K, nv, std::move(ps));
    };
    const auto X = ideal_of(j.at("surface").get<std::vector<std::string>>());
    const json& cyc = j.at("cycles");
    auto cycle = [&](const std::string& name) {
        require(cyc.contains(name), ErrorKind::invalid_input, "no ideal for cycle " + name);
        return ideal_of(cyc.at(name).get<std::vector<std::string>>());
    };
    std::vector<HomIdeal<GaloisField>> Y;
    for (const auto& c : cols) Y.push_back(cycle(c));
    IntMatrix M(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto Z = cycle(rows[r]);
        for (std::size_t c = 0; c < cols.size(); ++c) M(r, c) = proper_intersection_number(X, Z, Y[c]);
        if (heartbeat) heartbeat("pairings: row " + std::to_string(r + 1) + "/" + std::to_string(rows.size()));
    }
    return M;
}

inline CycleData cycles_from_json(const json& j, const std::function<void(const std::string&)>& heartbeat = {}) {
    CycleData d;
    d.basis = j.at("basisCycles").get<std::vector<std::string>>();
    const std::size_t k = d.basis.size();
    require(k >= 1, ErrorKind::invalid_input, "no basis cycles");
    if (j.contains("pairings")) {
        d.pairings = int_matrix_from_json(j.at("pairings"));
        require(d.pairings.cols() == k, ErrorKind::invalid_input, "pairing rows must have one entry per basis cycle");
        for (std::size_t r = 0; r < d.pairings.rows(); ++r) d.rowNames.push_back("z" + std::to_string(r + 1));
        if (j.contains("zCycles")) d.rowNames = j.at("zCycles").get<std::vector<std::string>>();
        require(d.rowNames.size() == d.pairings.rows(), ErrorKind::invalid_input, "zCycles and pairings disagree in length");
    } else {
        d.rowNames = j.at("zCycles").get<std::vector<std::string>>();
        d.pairings = compute_pairings(j, d.rowNames, d.basis, heartbeat);
        d.computed = true;
    }
    const json action = j.value("action", json::object());
    for (const auto& g : action.value("generators", json::array())) d.action.push_back(action_matrix(g, k));
    d.relations = action.value("relations", std::vector<std::vector<std::size_t>>{});
    for (const auto& c : j.value("candidates", json::array())) {
        std::vector<Int> v;
        for (const auto& x : c.at("pairingVector")) v.push_back(Int(x.get<long long>()));
        require(v.size() == k, ErrorKind::invalid_input, "candidate pairing vector has wrong length");
        d.candidates.emplace_back(c.at("name").get<std::string>(), std::move(v));
    }
    if (j.contains("rho")) d.rho = j.at("rho").get<std::size_t>();
    return d;
}

inline json certificate_json(const RankCertificate& c) {
    return {{"value", c.value},
            {"rows", c.rowLabels},
            {"cols", c.colLabels},
            {"minor", picardkit::to_json(c.minor)},
            {"det", int_json(det(c.minor))}};
}

/// Lower certificates from a growing prefix of the z-cycles, then each candidate; stops at the Tate bound.
inline json cmd_rank(const json& zetaFile, const json& cyclesFile, unsigned p, const RunConfig& cfg, bool* halted_out = nullptr) {
    const ZetaFunction Z = zeta_from_json(zetaFile.contains("zeta") ? zetaFile.at("zeta") : zetaFile);
    const json inputs{{"zeta", picardkit::to_json(Z)}, {"cycles", cyclesFile}, {"p", p}};
    json r = envelope("rank", inputs);
    const std::string dig = r.at("inputsDigest").get<std::string>();
    const auto T = dim_v_mu(Z, p, cfg.precision_bits);
    const CycleData d = cycles_from_json(cyclesFile, cfg.heartbeat);

    std::optional<AlgorithmB> alg;
    if (cfg.checkpoint && std::filesystem::exists(*cfg.checkpoint)) alg = AlgorithmB::resume(read_json_file(*cfg.checkpoint), dig);
    else alg.emplace(p, T.vMu, dig);
    require(alg->upper() == T.vMu, ErrorKind::invalid_input, "checkpoint upper bound differs from the recomputed one");

    // The certificate stream, in a fixed order so a checkpoint can skip what it has seen.
    std::vector<std::string> rowNames = d.rowNames;
    IntMatrix rows = d.pairings;
    std::vector<std::size_t> prefixes;
    for (std::size_t i = 1; i <= rows.rows(); ++i) prefixes.push_back(i);
    if (!d.candidates.empty()) {
        std::vector<std::vector<Int>> all = rows.to_rows();
        for (const auto& [name, v] : d.candidates) {
            all.push_back(v);
            rowNames.push_back(name);
            prefixes.push_back(all.size());
        }
        rows = IntMatrix::from_rows(all, d.basis.size());
    }
    std::size_t seen = alg->history().size();
    for (std::size_t s = seen; s < prefixes.size() && !alg->halted(); ++s) {
        std::vector<std::size_t> idx(prefixes[s]), cols(d.basis.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t c = 0; c < cols.size(); ++c) cols[c] = c;
        alg->offer(lower_certificate(rows.submatrix(idx, cols), rowNames, d.basis));
    }
    if (cfg.checkpoint) {
        std::ofstream out(*cfg.checkpoint);
        require(static_cast<bool>(out), ErrorKind::invalid_input, "cannot write checkpoint " + cfg.checkpoint->string());
        out << alg->checkpoint().dump(1) << "\n";
    }

    json rank{{"p", p},
              {"upperBound", T.vMu},
              {"lowerBound", alg->best()},
              {"halted", alg->halted()},
              {"history", alg->history()},
              {"pairingsComputed", d.computed}};
    if (alg->best_certificate()) rank["certificate"] = certificate_json(*alg->best_certificate());
    std::optional<std::size_t> rho = d.rho;
    if (!rho && alg->halted()) rho = alg->best();
    if (rho) {
        const NLattice N = build_N(rows, d.action, d.relations, *rho);
        json classMap = json::array();
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            json coords = json::array();
            for (const auto& x : N.coordinates(rows.row(i))) coords.push_back(int_json(x));
            classMap.push_back({{"name", rowNames[i]}, {"coordinates", coords}});
        }
        rank["N"] = {{"rank", N.lattice.rank},
                     {"rho", *rho},
                     {"basis", picardkit::to_json(N.basis)},
                     {"invariantsRank", invariants_rank(N.lattice)},
                     {"classMap", classMap}};
    }
    r["tate"] = tate_json(T);
    r["rank"] = rank;
    if (halted_out) *halted_out = alg->halted();
    return r;
}

// ---------------------------------------------------------------------------
// torsion / galois-rank

inline json torsion_json(const TorsionGroup& G) {
    json j{{"multiplicities", G.multiplicities}, {"exponents", G.exponents()}, {"complete", G.complete}};
    if (!G.complete) j["unresolved"] = {{"summands", G.unresolved_summands}, {"exponentAtLeast", G.exponent_lower_bound}};
    return j;
}

/// i = nullopt reports every degree.
inline json cmd_torsion(const json& tableFile, std::optional<unsigned> i) {
    const SizeTable t = size_table_from_json(tableFile);
    json inputs{{"table", to_json(t)}};
    if (i) inputs["i"] = *i;
    json r = envelope("torsion", inputs);
    json out = json::array();
    for (unsigned k = 0; k <= t.top_degree(); ++k)
        if (!i || *i == k) out.push_back({{"i", k}, {"torsion", torsion_json(torsion_from_sizes(t, k))}});
    require(!out.empty(), ErrorKind::invalid_input, "degree beyond the top degree");
    r["torsion"] = {{"ell", t.ell}, {"levels", t.complete_levels()}, {"degrees", out}};
    return r;
}

inline json cmd_galrank(const json& familyFile) {
    const ModuleFamily F = module_family_from_json(familyFile);
    json r = envelope("galois-rank", to_json(F));
    json members = json::array();
    for (const auto& T : F.modules) {
        const auto inv = invariants(T);
        members.push_back({{"n", T.n}, {"logOrder", inv.log_order}, {"structure", inv.structure}});
    }
    const auto R = rank_upper_bounds(F.modules, F.t);
    json u = json::array();
    for (const auto& [n, un] : R.u) u.push_back({{"n", n}, {"u", un}});
    r["galoisRank"] = {{"ell", F.ell}, {"t", F.t}, {"invariants", members}, {"bounds", u}, {"upperBound", R.min}};
    return r;
}

// ---------------------------------------------------------------------------
// dovetail demo

/// Task i searches for the least m >= 1 with m^2 = i mod (2i + 1). It never halts when i is a non-residue.
inline std::unique_ptr<Task> demo_task(unsigned i) {
    const long long mod = 2LL * i + 1;
    return std::make_unique<SearchTask>(
        [i, mod](long long m) { return m <= mod && (m * m) % mod == i % mod; }, 1, "sqrt-" + std::to_string(i));
}

inline json cmd_dovetail_demo(unsigned rounds, unsigned tasks, std::ostream* trace) {
    require(rounds >= 1 && rounds <= 30, ErrorKind::invalid_input, "rounds must be in 1..30");
    GeometricOptions opt;
    opt.max_rounds = rounds;
    opt.record_events = false;
    if (trace) opt.on_event = [trace](const Event& e) { *trace << e.to_json().dump() << "\n"; };
    std::vector<json> halts;
    const auto res = run_geometric(
        [tasks](unsigned i) { return i <= tasks ? demo_task(i) : nullptr; },
        [&](const Halt& h) {
            halts.push_back({{"taskId", h.taskId}, {"value", h.value ? json(*h.value) : json()}, {"round", h.round},
                             {"slot", h.slot}, {"quanta", h.task_quanta}});
        },
        opt);
    json r = envelope("dovetail", {{"rounds", rounds}, {"tasks", tasks}});
    json running = json::array();
    for (unsigned id = 1; id <= res.quanta_per_task.size(); ++id) {
        const bool halted = std::any_of(halts.begin(), halts.end(), [&](const json& h) { return h.at("taskId") == id; });
        if (!halted) running.push_back(id);
    }
    SearchTask day([](long long m) { return m * m > 40; }, 1, "day");
    SearchTask night([](long long m) { return m * m * m > 40; }, 1, "night");
    const auto dn = day_night(day, night, 1000);
    const char* winner = dn.winner == DayNightWinner::day ? "day" : dn.winner == DayNightWinner::night ? "night" : "undecided";
    r["dovetail"] = {{"rounds", res.rounds},
                     {"totalQuanta", res.total_quanta},
                     {"quantaPerTask", res.quanta_per_task},
                     {"halts", halts},
                     {"runningMax", res.running_max()},
                     {"stillRunning", running},
                     {"exhausted", res.exhausted},
                     {"dayNight", {{"winner", winner}, {"value", dn.value ? json(*dn.value) : json()},
                                   {"daySteps", dn.day_steps}, {"nightSteps", dn.night_steps}}}};
    return r;
}

} // namespace picardkit::report
