// Command-line front end for the hyperbox library: single-instance
// queries, prime sweeps with CSV/JSON output, and log-log exponent fits.
//
// Exit codes: 0 success, 1 usage error (bad flags, unreadable or
// unwritable files, malformed config), 2 precondition violation during
// computation (non-prime modulus, out-of-range parameters and the like).

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperbox/charsum.hpp"
#include "hyperbox/hyperbola.hpp"
#include "hyperbox/modarith.hpp"
#include "hyperbox/nqr.hpp"
#include "hyperbox/sweep.hpp"

namespace hx = hyperbox;

namespace {

std::string text_line(const hx::ojson& obj) {
    std::string out;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!out.empty()) out += ' ';
        out += it.key();
        out += '=';
        out += it.value().dump();
    }
    return out;
}

void print_object(const hx::ojson& obj, const std::string& format) {
    if (format == "json")
        std::cout << obj.dump(2) << '\n';
    else
        std::cout << text_line(obj) << '\n';
}

hx::ojson minbox_json(hx::u64 p, hx::u64 c, const hx::MinBoxResult& r) {
    return hx::ojson(hx::MinBoxRow{p, c, r.h_star, r.witness.first.x, r.witness.first.y,
                                   r.witness.second.x, r.witness.second.y, r.offset.a,
                                   r.offset.b_sign, r.offset.b_magnitude});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"survey tool for two-point boxes on modular hyperbolas"};
    app.require_subcommand(1);

    // shared option storage; each subcommand binds the flags it uses
    hx::u64 p = 7, c = 1, N = 0, H = 2, U = 1, r = 1, seed = 0, sample_c = 0;
    double epsilon = 0.1, Cconst = 2.0;
    unsigned threads = 1;
    std::string format = "text", out_path, mode_str, in_path, field;
    std::vector<hx::u64> c_list, family;
    bool even = false;

    auto* cmd_minbox = app.add_subcommand("minbox", "minimal two-point box for one (p, c)");
    cmd_minbox->add_option("--p", p, "odd prime modulus")->required();
    cmd_minbox->add_option("--c", c, "residue class, nonzero mod p")->required();
    cmd_minbox->add_option("--format", format, "text or json");

    auto* cmd_criterion =
        app.add_subcommand("criterion", "does a box of side H hold two points?");
    cmd_criterion->add_option("--p", p, "odd prime modulus")->required();
    cmd_criterion->add_option("--c", c, "residue class, nonzero mod p")->required();
    cmd_criterion->add_option("--H", H, "box side, in [2, p]")->required();
    cmd_criterion->add_flag("--even", even, "restrict to doubled offsets");
    cmd_criterion->add_option("--format", format, "text or json");

    auto* cmd_charsum = app.add_subcommand("charsum", "short character sum S(N;H)");
    cmd_charsum->add_option("--p", p, "odd prime modulus")->required();
    cmd_charsum->add_option("--N", N, "window start, N + H <= p-1");
    cmd_charsum->add_option("--H", H, "window length")->required();
    cmd_charsum->add_option("--format", format, "text or json");

    auto* cmd_shao = app.add_subcommand("shao", "mean-value statistic over a spaced family");
    cmd_shao->add_option("--p", p, "odd prime modulus")->required();
    cmd_shao->add_option("--H", H, "window length")->required();
    cmd_shao->add_option("--r", r, "moment order");
    cmd_shao->add_option("--family", family, "starting points; default 0, H, 2H, ...")
        ->delimiter(',');
    cmd_shao->add_option("--format", format, "text or json");

    auto* cmd_moment = app.add_subcommand("moment", "hyperbola moment over u <= U");
    cmd_moment->add_option("--p", p, "odd prime modulus")->required();
    cmd_moment->add_option("--c", c, "residue class, nonzero mod p");
    cmd_moment->add_option("--U", U, "inner range, in [1, p-1]")->required();
    cmd_moment->add_option("--r", r, "moment order");
    cmd_moment->add_option("--format", format, "text or json");

    auto* cmd_nqr = app.add_subcommand("nqr", "least quadratic nonresidue");
    cmd_nqr->add_option("--p", p, "odd prime modulus")->required();
    cmd_nqr->add_option("--format", format, "text or json");

    auto* cmd_dichotomy = app.add_subcommand("dichotomy", "two-branch threshold record");
    cmd_dichotomy->add_option("--p", p, "odd prime modulus")->required();
    cmd_dichotomy->add_option("--epsilon", epsilon, "exponent slack, > 0");
    cmd_dichotomy->add_option("--C", Cconst, "threshold constant, > 0");
    cmd_dichotomy->add_option("--format", format, "text or json");

    auto* cmd_sweep = app.add_subcommand("sweep", "run one mode over a prime range");
    hx::u64 p_min = 5, p_max = 5;
    cmd_sweep->add_option("--mode", mode_str, "minbox, dichotomy, shao, moment or nqr")
        ->required();
    cmd_sweep->add_option("--p-min", p_min, "lower end of the prime range")->required();
    cmd_sweep->add_option("--p-max", p_max, "upper end of the prime range")->required();
    cmd_sweep->add_option("--c", c_list, "residue classes for minbox; single c for moment");
    cmd_sweep->add_option("--sample-c", sample_c, "draw this many c per prime (minbox)");
    cmd_sweep->add_option("--seed", seed, "seed for sampled c");
    cmd_sweep->add_option("--H", H, "shao window; default ceil(sqrt(p))");
    cmd_sweep->add_option("--U", U, "moment range; default ceil(p^(1/2r))");
    cmd_sweep->add_option("--r", r, "moment order");
    cmd_sweep->add_option("--epsilon", epsilon, "dichotomy slack");
    cmd_sweep->add_option("--C", Cconst, "dichotomy constant");
    cmd_sweep->add_option("--threads", threads, "worker threads");
    std::string sweep_format = "csv";
    cmd_sweep->add_option("--format", sweep_format, "csv or json");
    cmd_sweep->add_option("--out", out_path, "output file; stdout when omitted");

    auto* cmd_fit = app.add_subcommand("fit", "log-log slope of a swept field");
    cmd_fit->add_option("--in", in_path, "CSV or JSON produced by sweep")->required();
    cmd_fit->add_option("--field", field, "column to fit against p")->required();
    cmd_fit->add_option("--format", format, "text or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    const bool H_set = cmd_sweep->count("--H") > 0;
    const bool U_set = cmd_sweep->count("--U") > 0;

    try {
        if (cmd_minbox->parsed()) {
            const hx::HyperbolaInstance inst(hx::Modulus{p}, c);
            print_object(minbox_json(p, inst.c(), hx::min_box_fast(inst)), format);
        } else if (cmd_criterion->parsed()) {
            const hx::HyperbolaInstance inst(hx::Modulus{p}, c);
            const auto w = even ? hx::criterion_even(inst, H) : hx::criterion_decide(inst, H);
            hx::ojson obj{{"p", p}, {"c", inst.c()}, {"H", H},
                          {"even", even}, {"exists", w.has_value()}};
            if (w) {
                obj["a"] = w->a;
                obj["b_sign"] = w->b_sign;
                obj["b"] = w->b_magnitude;
            }
            print_object(obj, format);
        } else if (cmd_charsum->parsed()) {
            const hx::CharSumTable table(hx::Modulus{p});
            print_object(hx::ojson{{"p", p},
                                   {"N", N},
                                   {"H", H},
                                   {"sum", hx::char_sum(table, N, H)},
                                   {"max_abs", hx::max_partial(table, N, H)}},
                         format);
        } else if (cmd_shao->parsed()) {
            const hx::Modulus m(p);
            std::vector<hx::u64> pts = family;
            if (pts.empty())
                for (hx::u64 n = 0; n + H <= p - 1; n += H) pts.push_back(n);
            const hx::CharSumTable table(m);
            const hx::SpacedFamily fam(m, std::move(pts));
            const auto rep = hx::shao_statistic(table, fam, H, r);
            print_object(hx::ojson(hx::ShaoRow{p, H, r, fam.size(), rep.value, rep.bound,
                                               rep.ratio}),
                         format);
        } else if (cmd_moment->parsed()) {
            const hx::Modulus m(p);
            const auto rep = hx::weil_moment(m, c, U, r);
            print_object(hx::ojson(hx::MomentRow{p, c % p, U, r, rep.value, rep.bound,
                                                 rep.ratio}),
                         format);
        } else if (cmd_nqr->parsed()) {
            print_object(hx::ojson(hx::NqrRow{p, hx::least_nonresidue(hx::Modulus{p}).n_p}),
                         format);
        } else if (cmd_dichotomy->parsed()) {
            const auto d = hx::dichotomy_check(hx::Modulus{p}, epsilon, Cconst);
            print_object(hx::ojson(hx::DichotomyRow{d.p, d.n_p, d.epsilon, d.C, d.threshold_A,
                                                    d.branch_A, d.max_h_star, d.threshold_B,
                                                    d.branch_B}),
                         format);
        } else if (cmd_sweep->parsed()) {
            const auto mode = hx::mode_from_name(mode_str);
            if (!mode)
                throw hx::ConfigError("sweep: unknown mode " + mode_str);
            if (sweep_format != "csv" && sweep_format != "json")
                throw hx::ConfigError("sweep: format must be csv or json");
            if (!c_list.empty() && sample_c > 0)
                throw hx::ConfigError("sweep: --c and --sample-c are mutually exclusive");

            hx::SweepConfig cfg;
            cfg.p_min = p_min;
            cfg.p_max = p_max;
            cfg.mode = *mode;
            cfg.seed = seed;
            cfg.r = r;
            cfg.epsilon = epsilon;
            cfg.C = Cconst;
            cfg.threads = threads;
            cfg.format = sweep_format == "csv" ? hx::OutputFormat::csv : hx::OutputFormat::json;
            if (H_set) cfg.H = H;
            if (U_set) cfg.U = U;
            if (!c_list.empty()) {
                cfg.c_select = hx::CSelect::list;
                cfg.c_list = c_list;
                cfg.c = c_list.front();
            } else if (sample_c > 0) {
                cfg.c_select = hx::CSelect::sample;
                cfg.c_sample = sample_c;
            }

            const auto records = hx::run_sweep(cfg, &std::cerr);
            if (out_path.empty()) {
                hx::emit(records, cfg.mode, cfg.format, std::cout);
            } else {
                std::ofstream file(out_path, std::ios::binary);
                if (!file) {
                    std::cerr << "error: cannot open " << out_path << '\n';
                    return 1;
                }
                hx::emit(records, cfg.mode, cfg.format, file);
                if (!file) {
                    std::cerr << "error: write failed on " << out_path << '\n';
                    return 1;
                }
            }
        } else if (cmd_fit->parsed()) {
            std::ifstream file(in_path, std::ios::binary);
            if (!file) {
                std::cerr << "error: cannot open " << in_path << '\n';
                return 1;
            }
            const bool json_in =
                in_path.size() >= 5 && in_path.substr(in_path.size() - 5) == ".json";
            const hx::FitResult fit = json_in ? hx::fit_exponent_json(file, field)
                                              : hx::fit_exponent_csv(file, field);
            print_object(hx::ojson{{"field", field},
                                   {"alpha", fit.alpha},
                                   {"beta", fit.beta},
                                   {"n_points", fit.n_points},
                                   {"reference_quarter", fit.reference_quarter},
                                   {"reference_sixth", fit.reference_sixth}},
                         format);
        }
    } catch (const hx::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
