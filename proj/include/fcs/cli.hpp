#pragma once

// Command implementations behind the `fcs` binary: attenuation sweeps,
// single-point evaluation, Monte Carlo simulation runs and bound-coverage
// experiments. Flag values win over config-file values.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fcs/config.hpp"
#include "fcs/io.hpp"
#include "fcs/optimizer.hpp"
#include "fcs/security.hpp"
#include "fcs/simulator.hpp"

namespace fcs {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> r_total;
    std::optional<double> attenuation_db;
    bool optimize = false;
};

// One row per (r_total, attenuation), ordered by (r_total asc, attenuation
// asc). After a curve has been positive, the first zero-rate row terminates it.
inline void cmd_sweep(const Config& cfg, const CliOverrides& ov, std::ostream& out) {
    SweepSpec spec = sweep_from_config(cfg);
    if (ov.r_total) spec.range_list = {*ov.r_total};
    ChannelParams channel = channel_from_config(cfg);
    ProtocolParams proto = protocol_from_config(cfg);
    double eps_tot = eps_tot_from_config(cfg);

    std::sort(spec.range_list.begin(), spec.range_list.end());
    out << "r_total,attenuation_db,mu_opt,p_est_opt,n_ph_bar,key_length,rate\n";
    for (int r_total : spec.range_list) {
        bool seen_positive = false;
        for (double att = spec.attenuation_start; att <= spec.attenuation_stop + 1e-9;
             att += spec.attenuation_step) {
            ChannelParams ch = channel;
            ch.attenuation_db = att;
            OptimizationResult res = optimize(ch, proto.n_rounds, r_total, 0, eps_tot);
            double n_ph_bar = 0.0, l = 0.0;
            if (!res.all_zero) {
                ProtocolParams p = proto;
                p.mu = res.mu_opt;
                p.p_est = res.p_est_opt;
                p.r1 = r_total;
                p.r2 = 0;
                p.p0a_floor.reset();
                p.p0b_floor.reset();
                auto bd = key_rate_breakdown(p, ch, eps_tot);
                n_ph_bar = bd.result.n_ph_bar;
                l = bd.result.key_length;
            }
            out << r_total << ',' << fmt_g12(att) << ',' << fmt_g12(res.mu_opt) << ','
                << fmt_g12(res.p_est_opt) << ',' << fmt_g12(n_ph_bar) << ',' << fmt_g12(l)
                << ',' << fmt_g12(res.rate_opt) << '\n';
            if (res.rate_opt > 0.0)
                seen_positive = true;
            else if (seen_positive)
                break;
        }
    }
}

// Evaluates the bound pipeline at one operating point (optionally optimizing
// mu and P_est first) and emits every intermediate quantity as one JSON record.
inline void cmd_point(const Config& cfg, const CliOverrides& ov, std::ostream& out) {
    ChannelParams channel = channel_from_config(cfg);
    if (ov.attenuation_db) channel.attenuation_db = *ov.attenuation_db;
    ProtocolParams proto = protocol_from_config(cfg);
    if (ov.r_total) {
        proto.r1 = *ov.r_total;
        proto.r2 = 0;
    }
    double eps_tot = eps_tot_from_config(cfg);

    bool optimized = ov.optimize;
    if (optimized) {
        OptimizationResult res = optimize(channel, proto.n_rounds, proto.r1, proto.r2, eps_tot);
        if (!res.all_zero) {
            proto.mu = res.mu_opt;
            proto.p_est = res.p_est_opt;
            proto.p0a_floor.reset();
            proto.p0b_floor.reset();
        }
    }
    auto bd = key_rate_breakdown(proto, channel, eps_tot);
    JsonRecord rec;
    rec.field("n_rounds", proto.n_rounds)
        .field("mu", proto.mu)
        .field("p_est", proto.p_est)
        .field("r1", static_cast<std::int64_t>(proto.r1))
        .field("r2", static_cast<std::int64_t>(proto.r2))
        .field("optimized", optimized)
        .field("attenuation_db", channel.attenuation_db)
        .field("eps", bd.budget.eps)
        .field("eps_cor", bd.budget.eps_cor)
        .field("eps_tilde", bd.budget.eps_tilde)
        .field("eps_prime", bd.budget.eps_prime)
        .field("eps_sec", bd.budget.eps_sec)
        .field("eps_tot", bd.budget.eps_tot)
        .field("p_succ", bd.expected.p_succ)
        .field("e_bit", bd.expected.e_bit)
        .field("n_sig_tol", bd.n_sig_tol)
        .field("n_est_tol", bd.n_est_tol)
        .field("n_minus_minus_bar", bd.nmm_bar)
        .field("n_ph_bar", bd.result.n_ph_bar)
        .field("leak_ec", bd.result.leak_ec)
        .field("key_length", bd.result.key_length)
        .field("rate", bd.result.rate);
    out << rec.str() << '\n';
}

// Runs the seeded protocol simulation and prints a one-line summary record.
// A protocol abort is a domain outcome, not a tool failure.
inline void cmd_simulate(const Config& cfg, const CliOverrides& ov, std::ostream& out) {
    SimConfig sim;
    sim.channel = channel_from_config(cfg);
    if (ov.attenuation_db) sim.channel.attenuation_db = *ov.attenuation_db;
    sim.protocol = protocol_from_config(cfg);
    sim.n_rounds = cfg.get_int64_or("sim", "n_rounds", 1000000);
    sim.protocol.n_rounds = sim.n_rounds;
    sim.seed = ov.seed ? *ov.seed
                       : static_cast<std::uint64_t>(cfg.get_int64_or("sim", "seed", 1));
    sim.kernel_a = kernel_from_config(cfg, "kernel_a", sim.protocol.mu);
    sim.kernel_b = kernel_from_config(cfg, "kernel_b", sim.protocol.mu);
    if (cfg.has("sim", "n_sig_tol")) sim.n_sig_tol = cfg.get_int64("sim", "n_sig_tol");
    if (cfg.has("sim", "n_est_tol")) sim.n_est_tol = cfg.get_int64("sim", "n_est_tol");

    SimResult res = run_protocol(sim);
    JsonRecord rec;
    rec.field("seed", static_cast<std::int64_t>(sim.seed))
        .field("n_rounds", sim.n_rounds)
        .field("n_sig", res.tallies.n_sig)
        .field("n_est_bit", res.tallies.n_est_bit)
        .field("n_sig_tol", res.tallies.n_sig_tol)
        .field("n_est_tol", res.tallies.n_est_tol)
        .field("n_est_clicks", res.n_est_clicks)
        .field("n_clicks_total", res.n_clicks_total)
        .field("aborted", res.aborted)
        .field("z_n_sig", res.z.n_sig)
        .field("z_n_est", res.z.n_est)
        .field("z_n_est_bit", res.z.n_est_bit);
    out << rec.str() << '\n';
}

// The configured coverage experiments, one row each. Defaults exercise every
// Kato direction on i.i.d. and prefix-dependent sequences plus the Chernoff
// bound; all thresholds are eps + 3 sqrt(eps(1-eps)/trials).
inline void cmd_coverage(const Config& cfg, const CliOverrides& ov, std::ostream& out) {
    int trials = static_cast<int>(cfg.get_int64_or("coverage", "trials", 2000));
    if (trials < 1) throw ConfigError("coverage: trials must be >= 1");
    std::int64_t n = cfg.get_int64_or("coverage", "n", 10000);
    double eps = cfg.get_double_or("coverage", "eps", 0.05);
    std::uint64_t seed = ov.seed ? *ov.seed
                                 : static_cast<std::uint64_t>(cfg.get_int64_or("coverage", "seed", 1));

    struct Row {
        const char* bound;
        BoundKind kind;
        const char* sequence;
        SequenceSpec spec;
        double eps;
    };
    SequenceSpec iid{SequenceSpec::Kind::IidBernoulli, 0.3, 0.0, 0.0};
    SequenceSpec mart{SequenceSpec::Kind::PrefixMartingale, 0.0, 0.2, 0.3};
    SequenceSpec binom{SequenceSpec::Kind::Binomial, 0.1, 0.0, 0.0};
    std::vector<Row> rows;
    for (auto [name, kind] : {std::pair{"U_e", BoundKind::ExpectationUpper},
                              std::pair{"L_e", BoundKind::ExpectationLower},
                              std::pair{"U_m", BoundKind::ObservationUpper},
                              std::pair{"L_m", BoundKind::ObservationLower}}) {
        rows.push_back({name, kind, "iid_bernoulli", iid, eps});
        rows.push_back({name, kind, "prefix_martingale", mart, eps});
    }
    rows.push_back({"C_U", BoundKind::ChernoffUpper, "binomial", binom, eps});
    rows.push_back({"C_U", BoundKind::ChernoffUpper, "binomial", binom,
                    cfg.get_double_or("coverage", "eps_chernoff", 0.01)});

    out << "bound,sequence,n,epsilon,trials,violation_fraction,threshold,status\n";
    std::uint64_t stream_seed = seed;
    for (const auto& row : rows) {
        double fraction = coverage_experiment(row.kind, row.spec, n, row.eps, trials,
                                              CounterRng::mix(stream_seed++));
        double threshold = row.eps + 3.0 * std::sqrt(row.eps * (1.0 - row.eps) / trials);
        out << row.bound << ',' << row.sequence << ',' << n << ',' << fmt_g12(row.eps) << ','
            << trials << ',' << fmt_g12(fraction) << ',' << fmt_g12(threshold) << ','
            << (fraction <= threshold ? "pass" : "fail") << '\n';
    }
}

} // namespace fcs
