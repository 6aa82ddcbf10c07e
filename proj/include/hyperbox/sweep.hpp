#pragma once

// Prime sweeps over the library's instruments: deterministic parallel
// execution, CSV/JSON emission with stable bytes, and log-log exponent
// fitting against the 1/4 and 1/6 benchmark slopes.
//
// Determinism is the design constraint here. Results land in
// preallocated per-prime slots and are merged in prime order, so the
// output bytes never depend on the thread count; sampled c values come
// from a per-prime seeded generator, so they never depend on work
// scheduling either.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "charsum.hpp"
#include "hyperbola.hpp"
#include "modarith.hpp"
#include "nqr.hpp"

namespace hyperbox {

using ojson = nlohmann::ordered_json;

/// Config mistakes (bad ranges, missing parameters) are distinct from
/// per-instance precondition failures discovered mid-sweep; the CLI maps
/// the former to its usage exit code.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SweepMode { minbox, dichotomy, shao, moment, nqr };
enum class OutputFormat { csv, json };

inline const char* mode_name(SweepMode m) {
    switch (m) {
        case SweepMode::minbox: return "minbox";
        case SweepMode::dichotomy: return "dichotomy";
        case SweepMode::shao: return "shao";
        case SweepMode::moment: return "moment";
        case SweepMode::nqr: return "nqr";
    }
    return "?";
}

inline std::optional<SweepMode> mode_from_name(std::string_view s) {
    for (SweepMode m : {SweepMode::minbox, SweepMode::dichotomy, SweepMode::shao,
                        SweepMode::moment, SweepMode::nqr})
        if (s == mode_name(m)) return m;
    return std::nullopt;
}

/// How the minbox sweep picks residue classes per prime.
enum class CSelect { all, list, sample };

struct SweepConfig {
    u64 p_min = 5;
    u64 p_max = 5;
    SweepMode mode = SweepMode::minbox;

    CSelect c_select = CSelect::all; // minbox only
    std::vector<u64> c_list;         // c_select == list
    u64 c_sample = 0;                // c_select == sample: draws per prime
    u64 seed = 0;                    // sampling seed

    std::optional<u64> H; // shao window; default ceil(sqrt(p)) per prime
    u64 r = 1;            // shao and moment
    std::optional<u64> U; // moment range; default ceil(p^(1/2r)) per prime
    u64 c = 1;            // moment residue class

    double epsilon = 0.1; // dichotomy
    double C = 2.0;

    unsigned threads = 1;
    OutputFormat format = OutputFormat::csv;
};

// One flat row per computed unit; field order below is the CSV column
// order and the JSON key order.

struct MinBoxRow {
    u64 p, c, h_star, x1, y1, x2, y2, a;
    int b_sign;
    u64 b;
    friend bool operator==(const MinBoxRow&, const MinBoxRow&) = default;
};

struct DichotomyRow {
    u64 p, n_p;
    double epsilon, C, threshold_A;
    bool branch_A;
    u64 max_h_star;
    double threshold_B;
    bool branch_B;
    friend bool operator==(const DichotomyRow&, const DichotomyRow&) = default;
};

struct ShaoRow {
    u64 p, H, r, J, value;
    double bound, ratio;
    friend bool operator==(const ShaoRow&, const ShaoRow&) = default;
};

struct MomentRow {
    u64 p, c, U, r, value;
    double bound, ratio;
    friend bool operator==(const MomentRow&, const MomentRow&) = default;
};

struct NqrRow {
    u64 p, n_p;
    friend bool operator==(const NqrRow&, const NqrRow&) = default;
};

using SweepRecord = std::variant<MinBoxRow, DichotomyRow, ShaoRow, MomentRow, NqrRow>;

inline void to_json(ojson& j, const MinBoxRow& row) {
    j = ojson{{"p", row.p},   {"c", row.c},   {"h_star", row.h_star},
              {"x1", row.x1}, {"y1", row.y1}, {"x2", row.x2},
              {"y2", row.y2}, {"a", row.a},   {"b_sign", row.b_sign},
              {"b", row.b}};
}

inline void from_json(const ojson& j, MinBoxRow& row) {
    row = {j.at("p").get<u64>(),  j.at("c").get<u64>(),  j.at("h_star").get<u64>(),
           j.at("x1").get<u64>(), j.at("y1").get<u64>(), j.at("x2").get<u64>(),
           j.at("y2").get<u64>(), j.at("a").get<u64>(),  j.at("b_sign").get<int>(),
           j.at("b").get<u64>()};
}

inline void to_json(ojson& j, const DichotomyRow& row) {
    j = ojson{{"p", row.p},
              {"n_p", row.n_p},
              {"epsilon", row.epsilon},
              {"C", row.C},
              {"threshold_A", row.threshold_A},
              {"branch_A", row.branch_A},
              {"max_h_star", row.max_h_star},
              {"threshold_B", row.threshold_B},
              {"branch_B", row.branch_B}};
}

inline void from_json(const ojson& j, DichotomyRow& row) {
    row = {j.at("p").get<u64>(),           j.at("n_p").get<u64>(),
           j.at("epsilon").get<double>(),  j.at("C").get<double>(),
           j.at("threshold_A").get<double>(), j.at("branch_A").get<bool>(),
           j.at("max_h_star").get<u64>(),  j.at("threshold_B").get<double>(),
           j.at("branch_B").get<bool>()};
}

inline void to_json(ojson& j, const ShaoRow& row) {
    j = ojson{{"p", row.p},         {"H", row.H},         {"r", row.r},
              {"J", row.J},         {"value", row.value}, {"bound", row.bound},
              {"ratio", row.ratio}};
}

inline void from_json(const ojson& j, ShaoRow& row) {
    row = {j.at("p").get<u64>(),     j.at("H").get<u64>(),
           j.at("r").get<u64>(),     j.at("J").get<u64>(),
           j.at("value").get<u64>(), j.at("bound").get<double>(),
           j.at("ratio").get<double>()};
}

inline void to_json(ojson& j, const MomentRow& row) {
    j = ojson{{"p", row.p},         {"c", row.c},         {"U", row.U},
              {"r", row.r},         {"value", row.value}, {"bound", row.bound},
              {"ratio", row.ratio}};
}

inline void from_json(const ojson& j, MomentRow& row) {
    row = {j.at("p").get<u64>(),     j.at("c").get<u64>(),
           j.at("U").get<u64>(),     j.at("r").get<u64>(),
           j.at("value").get<u64>(), j.at("bound").get<double>(),
           j.at("ratio").get<double>()};
}

inline void to_json(ojson& j, const NqrRow& row) {
    j = ojson{{"p", row.p}, {"n_p", row.n_p}};
}

inline void from_json(const ojson& j, NqrRow& row) {
    row = {j.at("p").get<u64>(), j.at("n_p").get<u64>()};
}

inline ojson record_to_json(const SweepRecord& rec) {
    return std::visit([](const auto& row) { return ojson(row); }, rec);
}

inline ojson records_to_json(const std::vector<SweepRecord>& recs) {
    ojson arr = ojson::array();
    for (const auto& rec : recs) arr.push_back(record_to_json(rec));
    return arr;
}

inline std::vector<SweepRecord> records_from_json(const ojson& arr, SweepMode mode) {
    std::vector<SweepRecord> out;
    out.reserve(arr.size());
    for (const auto& j : arr) {
        switch (mode) {
            case SweepMode::minbox: out.emplace_back(j.get<MinBoxRow>()); break;
            case SweepMode::dichotomy: out.emplace_back(j.get<DichotomyRow>()); break;
            case SweepMode::shao: out.emplace_back(j.get<ShaoRow>()); break;
            case SweepMode::moment: out.emplace_back(j.get<MomentRow>()); break;
            case SweepMode::nqr: out.emplace_back(j.get<NqrRow>()); break;
        }
    }
    return out;
}

/// Shortest round-trip decimal form, no locale involvement.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline const char* csv_header(SweepMode mode) {
    switch (mode) {
        case SweepMode::minbox: return "p,c,h_star,x1,y1,x2,y2,a,b_sign,b";
        case SweepMode::dichotomy:
            return "p,n_p,epsilon,C,threshold_A,branch_A,max_h_star,threshold_B,branch_B";
        case SweepMode::shao: return "p,H,r,J,value,bound,ratio";
        case SweepMode::moment: return "p,c,U,r,value,bound,ratio";
        case SweepMode::nqr: return "p,n_p";
    }
    return "";
}

namespace detail {

// CSV cell rendering per field type; rows were declared with fields in
// column order, so one visitor per row type keeps header and data in
// lockstep.
inline void csv_cell(std::string& line, u64 v) { line += std::to_string(v); }
inline void csv_cell(std::string& line, int v) { line += std::to_string(v); }
inline void csv_cell(std::string& line, bool v) { line += v ? "true" : "false"; }
inline void csv_cell(std::string& line, double v) { line += format_double(v); }

template <class... Ts>
std::string csv_line(const Ts&... fields) {
    std::string line;
    bool first = true;
    auto add = [&](const auto& f) {
        if (!first) line += ',';
        first = false;
        csv_cell(line, f);
    };
    (add(fields), ...);
    return line;
}

} // namespace detail

inline std::string csv_row(const SweepRecord& rec) {
    struct Visitor {
        std::string operator()(const MinBoxRow& r) const {
            return detail::csv_line(r.p, r.c, r.h_star, r.x1, r.y1, r.x2, r.y2, r.a, r.b_sign,
                                    r.b);
        }
        std::string operator()(const DichotomyRow& r) const {
            return detail::csv_line(r.p, r.n_p, r.epsilon, r.C, r.threshold_A, r.branch_A,
                                    r.max_h_star, r.threshold_B, r.branch_B);
        }
        std::string operator()(const ShaoRow& r) const {
            return detail::csv_line(r.p, r.H, r.r, r.J, r.value, r.bound, r.ratio);
        }
        std::string operator()(const MomentRow& r) const {
            return detail::csv_line(r.p, r.c, r.U, r.r, r.value, r.bound, r.ratio);
        }
        std::string operator()(const NqrRow& r) const {
            return detail::csv_line(r.p, r.n_p);
        }
    };
    return std::visit(Visitor{}, rec);
}

/// Writes records in the given format. CSV always carries the header
/// line, so an empty sweep still documents its schema.
inline void emit(const std::vector<SweepRecord>& recs, SweepMode mode, OutputFormat format,
                 std::ostream& os) {
    if (format == OutputFormat::csv) {
        os << csv_header(mode) << '\n';
        for (const auto& rec : recs) os << csv_row(rec) << '\n';
    } else {
        os << records_to_json(recs).dump(2) << '\n';
    }
}

inline void emit(const std::vector<SweepRecord>& recs, SweepMode mode, OutputFormat format,
                 const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit: cannot open " + path);
    emit(recs, mode, format, out);
    if (!out)
        throw std::runtime_error("emit: write failed on " + path);
}

// Deterministic sampling machinery. Hand-rolled so the draw sequence is
// a fixed function of the seed on every platform and standard library.

inline u64 splitmix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class SplitMix {
public:
    explicit SplitMix(u64 seed) : s_(seed) {}

    u64 next() {
        s_ += 0x9e3779b97f4a7c15ULL;
        u64 z = s_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [1, n] by rejection, never by modulo bias.
    u64 uniform1(u64 n) {
        const u64 rem = (~u64{0} % n + 1) % n; // 2^64 mod n
        for (;;) {
            const u64 z = next();
            if (rem != 0 && z >= u64{0} - rem) continue;
            return z % n + 1;
        }
    }

private:
    u64 s_;
};

inline std::vector<u64> primes_in_range(u64 lo, u64 hi) {
    std::vector<u64> out;
    for (u64 n = std::max<u64>(lo, 2); n <= hi; ++n)
        if (is_prime(n)) out.push_back(n);
    return out;
}

namespace detail {

// Residue classes for one prime of a minbox sweep, in ascending order.
inline std::vector<u64> c_values(const SweepConfig& cfg, u64 p) {
    std::vector<u64> cs;
    switch (cfg.c_select) {
        case CSelect::all:
            cs.reserve(static_cast<std::size_t>(p - 1));
            for (u64 c = 1; c < p; ++c) cs.push_back(c);
            break;
        case CSelect::list: {
            std::set<u64> reduced;
            for (u64 c : cfg.c_list) {
                if (c % p == 0)
                    throw std::invalid_argument("sweep: c divisible by p " + std::to_string(p));
                reduced.insert(c % p);
            }
            cs.assign(reduced.begin(), reduced.end());
            break;
        }
        case CSelect::sample: {
            if (cfg.c_sample >= p - 1) {
                for (u64 c = 1; c < p; ++c) cs.push_back(c);
                break;
            }
            // Seed depends only on (seed, p): the draw is scheduling-free.
            SplitMix rng(cfg.seed ^ splitmix64(p));
            std::set<u64> drawn;
            while (drawn.size() < cfg.c_sample) drawn.insert(rng.uniform1(p - 1));
            cs.assign(drawn.begin(), drawn.end());
            break;
        }
    }
    return cs;
}

inline u64 shao_window(const SweepConfig& cfg, u64 p) {
    if (cfg.H) return *cfg.H;
    return static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(p))));
}

inline u64 moment_range(const SweepConfig& cfg, u64 p) {
    if (cfg.U) return *cfg.U;
    const double e = 1.0 / (2.0 * static_cast<double>(cfg.r));
    return static_cast<u64>(std::ceil(std::pow(static_cast<double>(p), e)));
}

inline std::vector<SweepRecord> sweep_one(const SweepConfig& cfg, u64 pv) {
    const Modulus p(pv);
    std::vector<SweepRecord> out;
    switch (cfg.mode) {
        case SweepMode::minbox: {
            const auto cs = c_values(cfg, pv);
            // a shared chi table pays for itself once several classes
            // are swept; lone queries stay on the descent path
            std::optional<LegendreTable> table;
            if (cs.size() >= 2 && pv <= table_limit) table.emplace(p);
            for (u64 c : cs) {
                const HyperbolaInstance inst(p, c);
                const MinBoxResult r = table ? min_box_fast(inst, *table) : min_box_fast(inst);
                out.emplace_back(MinBoxRow{pv, c, r.h_star, r.witness.first.x,
                                           r.witness.first.y, r.witness.second.x,
                                           r.witness.second.y, r.offset.a, r.offset.b_sign,
                                           r.offset.b_magnitude});
            }
            break;
        }
        case SweepMode::dichotomy: {
            const DichotomyRecord d = dichotomy_check(p, cfg.epsilon, cfg.C);
            out.emplace_back(DichotomyRow{d.p, d.n_p, d.epsilon, d.C, d.threshold_A, d.branch_A,
                                          d.max_h_star, d.threshold_B, d.branch_B});
            break;
        }
        case SweepMode::shao: {
            const u64 H = shao_window(cfg, pv);
            if (H < 1 || H > pv - 1)
                throw std::invalid_argument("sweep: shao window outside [1, p-1] at p = " +
                                            std::to_string(pv));
            std::vector<u64> pts;
            for (u64 N = 0; N + H <= pv - 1; N += H) pts.push_back(N);
            const CharSumTable table(p);
            const SpacedFamily family(p, std::move(pts));
            const MomentReport rep = shao_statistic(table, family, H, cfg.r);
            out.emplace_back(
                ShaoRow{pv, H, cfg.r, family.size(), rep.value, rep.bound, rep.ratio});
            break;
        }
        case SweepMode::moment: {
            const u64 U = moment_range(cfg, pv);
            const MomentReport rep = weil_moment(p, cfg.c, U, cfg.r);
            out.emplace_back(
                MomentRow{pv, cfg.c % pv, U, cfg.r, rep.value, rep.bound, rep.ratio});
            break;
        }
        case SweepMode::nqr: {
            out.emplace_back(NqrRow{pv, least_nonresidue(p).n_p});
            break;
        }
    }
    return out;
}

inline void validate(const SweepConfig& cfg) {
    if (cfg.p_min > cfg.p_max)
        throw ConfigError("sweep: p_min must not exceed p_max");
    if (cfg.threads < 1)
        throw ConfigError("sweep: need at least one thread");
    if (cfg.r < 1)
        throw ConfigError("sweep: need r >= 1");
    if (cfg.H && *cfg.H < 1)
        throw ConfigError("sweep: window H must be positive");
    if (cfg.U && *cfg.U < 1)
        throw ConfigError("sweep: range U must be positive");
    if (cfg.c_select == CSelect::sample && cfg.c_sample < 1)
        throw ConfigError("sweep: sample count must be positive");
    if (cfg.c_select == CSelect::list && cfg.c_list.empty())
        throw ConfigError("sweep: empty c list");
    if (cfg.mode == SweepMode::dichotomy && (!(cfg.epsilon > 0.0) || !(cfg.C > 0.0)))
        throw ConfigError("sweep: dichotomy needs epsilon > 0 and C > 0");
}

} // namespace detail

/// Runs the configured sweep over every prime in [p_min, p_max].
/// Records come back sorted by (p, c) no matter how many workers ran;
/// an empty prime range yields an empty list plus a diagnostic line.
inline std::vector<SweepRecord> run_sweep(const SweepConfig& cfg,
                                          std::ostream* diagnostics = nullptr) {
    detail::validate(cfg);
    const auto primes = primes_in_range(cfg.p_min, cfg.p_max);
    if (primes.empty()) {
        if (diagnostics)
            *diagnostics << "warning: no primes in [" << cfg.p_min << ", " << cfg.p_max
                         << "]\n";
        return {};
    }

    std::vector<std::vector<SweepRecord>> slots(primes.size());
    std::atomic<std::size_t> cursor{0};
    std::mutex fail_mutex;
    std::exception_ptr failure;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= primes.size()) return;
            try {
                slots[i] = detail::sweep_one(cfg, primes[i]);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(fail_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(cfg.threads);
        for (unsigned t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<SweepRecord> out;
    for (auto& slot : slots)
        for (auto& rec : slot) out.push_back(std::move(rec));
    return out;
}

/// Least-squares slope of log(field) against log(p), with the two
/// benchmark exponents carried along for comparison in reports.
struct FitResult {
    double alpha;
    double beta;
    std::size_t n_points;
    double reference_quarter = 0.25;
    double reference_sixth = 1.0 / 6.0;
};

namespace detail {

inline FitResult fit_points(const std::vector<std::pair<double, double>>& pts) {
    std::set<double> distinct;
    for (const auto& [p, v] : pts) {
        distinct.insert(p);
        if (!(v >= 1.0))
            throw std::invalid_argument("fit: field values must be >= 1 for a log fit");
    }
    if (distinct.size() < 3)
        throw std::invalid_argument("fit: need at least 3 records with distinct p");
    double sx = 0, sy = 0;
    for (const auto& [p, v] : pts) {
        sx += std::log(p);
        sy += std::log(v);
    }
    const double n = static_cast<double>(pts.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& [p, v] : pts) {
        const double dx = std::log(p) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(v) - my);
    }
    return {sxy / sxx, my - (sxy / sxx) * mx, pts.size()};
}

} // namespace detail

/// Extracts (p, field) from each record and fits log(field) over log(p).
/// The field must be numeric and at least 1 everywhere; at least three
/// distinct primes are required for the slope to mean anything.
inline FitResult fit_exponent(const std::vector<SweepRecord>& recs, const std::string& field) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(recs.size());
    for (const auto& rec : recs) {
        const ojson j = record_to_json(rec);
        if (!j.contains(field))
            throw std::invalid_argument("fit: no field named " + field);
        const ojson& v = j.at(field);
        if (!v.is_number())
            throw std::invalid_argument("fit: field " + field + " is not numeric");
        pts.emplace_back(j.at("p").get<double>(), v.get<double>());
    }
    return detail::fit_points(pts);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline double parse_cell(const std::string& cell, const std::string& col) {
    double parsed = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw std::invalid_argument("fit: non-numeric cell in column " + col);
    return parsed;
}

} // namespace detail

/// Reads (p, field) pairs back out of an emitted CSV for fitting.
inline std::vector<std::pair<double, double>> fit_points_from_csv(std::istream& in,
                                                                  const std::string& field) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("fit: empty input");
    const auto cols = detail::split_csv_line(line);
    std::size_t p_col = cols.size(), f_col = cols.size();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "p") p_col = i;
        if (cols[i] == field) f_col = i;
    }
    if (p_col == cols.size() || f_col == cols.size())
        throw std::invalid_argument("fit: header lacks p or " + field);

    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != cols.size())
            throw std::invalid_argument("fit: row width differs from header");
        pts.emplace_back(detail::parse_cell(cells[p_col], "p"),
                         detail::parse_cell(cells[f_col], field));
    }
    return pts;
}

inline FitResult fit_exponent_csv(std::istream& in, const std::string& field) {
    return detail::fit_points(fit_points_from_csv(in, field));
}

inline FitResult fit_exponent_json(std::istream& in, const std::string& field) {
    const ojson arr = ojson::parse(in);
    if (!arr.is_array())
        throw std::invalid_argument("fit: JSON input must be an array of records");
    std::vector<std::pair<double, double>> pts;
    for (const auto& j : arr) {
        if (!j.contains("p") || !j.contains(field) || !j.at(field).is_number())
            throw std::invalid_argument("fit: record lacks numeric p or " + field);
        pts.emplace_back(j.at("p").get<double>(), j.at(field).get<double>());
    }
    return detail::fit_points(pts);
}

} // namespace hyperbox
