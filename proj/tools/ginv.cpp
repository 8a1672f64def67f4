// Command-line front end: limiting spectral transforms, asymptotic Frobenius
// functionals, density grids, Monte-Carlo sweeps and data-file estimation for
// generalized inverses of singular sample covariance matrices.

#include <complex>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ginv/experiments.hpp>
#include <ginv/frobenius.hpp>
#include <ginv/io.hpp>
#include <ginv/stieltjes.hpp>

namespace {

using ginv::Index;
using ginv::Matrix;

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string tok = text.substr(pos, comma - pos);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end == tok.c_str() || *end != '\0') {
            throw ginv::validation_error("cannot parse '" + tok + "' as a number");
        }
        out.push_back(v);
        if (comma == text.size()) break;
        pos = comma + 1;
    }
    return out;
}

// "50:500:50" (start:stop:step) or a comma list "50,100,200"
std::vector<Index> parse_p_grid(const std::string& text) {
    std::vector<Index> out;
    if (text.find(':') != std::string::npos) {
        long start = 0, stop = 0, step = 0;
        if (std::sscanf(text.c_str(), "%ld:%ld:%ld", &start, &stop, &step) != 3 || step <= 0 ||
            start <= 0 || stop < start) {
            throw ginv::validation_error("cannot parse p grid '" + text +
                                         "' (expected start:stop:step)");
        }
        for (long p = start; p <= stop; p += step) out.push_back(p);
    } else {
        for (double v : parse_double_list(text)) {
            if (v < 2 || v != std::floor(v)) {
                throw ginv::validation_error("p grid entries must be integers >= 2");
            }
            out.push_back(static_cast<Index>(v));
        }
    }
    return out;
}

// "xmin:xmax:npts"
std::vector<double> parse_grid_spec(const std::string& text) {
    double xmin = 0, xmax = 0;
    long npts = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%ld", &xmin, &xmax, &npts) != 3 || npts < 1 ||
        !(xmin > 0.0) || !(xmax > xmin)) {
        throw ginv::validation_error("cannot parse grid '" + text +
                                     "' (expected xmin:xmax:npts with 0 < xmin < xmax)");
    }
    std::vector<double> xs(static_cast<std::size_t>(npts));
    if (npts == 1) {
        xs[0] = xmin;
    } else {
        const double h = (xmax - xmin) / static_cast<double>(npts - 1);
        for (long i = 0; i < npts; ++i) xs[static_cast<std::size_t>(i)] = xmin + h * i;
    }
    return xs;
}

struct CommonFlags {
    std::string format = "text";
    int threads = 0;
};

// ----------------------------------------------------------------------------

void cmd_asymptotic(double c, const std::string& spectrum_text, const std::string& sigma_file,
                    const CommonFlags& common) {
    ginv::SpectrumSpec spec = ginv::SpectrumSpec::identity();
    if (!sigma_file.empty()) {
        const Matrix sigma = ginv::read_matrix_file(sigma_file);
        spec = ginv::CovarianceModel::from_dense(sigma).exact_spectrum();
    } else {
        spec = ginv::SpectrumSpec::parse(spectrum_text);
    }
    const double m0 = ginv::m_gram_zero(c, spec);
    const double fro_plus = ginv::asymptotic_fro_plus(c, spec);
    const double fro_minus = ginv::asymptotic_fro_minus(c, spec);
    const double nfl = fro_minus / fro_plus - 1.0;
    const double trace_minus = ginv::trace_limit_minus(c, spec);
    if (common.format == "csv") {
        std::cout << "c,fro_plus,fro_minus,nfl,m_zero,trace_minus\n"
                  << fmt17(c) << ',' << fmt17(fro_plus) << ',' << fmt17(fro_minus) << ','
                  << fmt17(nfl) << ',' << fmt17(m0) << ',' << fmt17(trace_minus) << '\n';
    } else {
        std::cout << "c            = " << fmt6(c) << '\n'
                  << "spectrum     = " << spec.to_string() << '\n'
                  << "fro_plus     = " << fmt6(fro_plus) << "   # lim (1/p)||S+||_F^2\n"
                  << "fro_minus    = " << fmt6(fro_minus) << "   # lim (1/p)||S-||_F^2\n"
                  << "nfl          = " << fmt6(nfl) << '\n'
                  << "m_zero       = " << fmt6(m0) << '\n'
                  << "trace_minus  = " << fmt6(trace_minus) << "   # lim (1/p)tr(S-)\n";
    }
}

void cmd_stieltjes(const std::string& which, double z_re, double z_im, double c,
                   const std::string& spectrum_text, double tol, int max_iter,
                   const CommonFlags& common) {
    const std::complex<double> z(z_re, z_im);
    ginv::SolveOptions opts{tol, max_iter};
    ginv::StieltjesSolution sol{z, {0.0, 0.0}, 0.0, 0, 1.0};
    if (which == "mp") {
        sol.m = ginv::mp_stieltjes(z, c);
    } else {
        const ginv::SpectrumSpec spec = ginv::SpectrumSpec::parse(spectrum_text);
        if (which == "plus") {
            sol = ginv::solve_m_plus(z, c, spec, opts);
        } else if (which == "minus") {
            sol = ginv::solve_m_minus(z, c, spec, opts);
        } else if (which == "underline") {
            sol = ginv::solve_m_gram(z, c, spec, opts);
        } else {
            throw ginv::validation_error("unknown transform '" + which +
                                         "' (expected plus|minus|mp|underline)");
        }
    }
    if (common.format == "csv") {
        std::cout << "which,z_re,z_im,c,m_re,m_im,residual,iterations\n"
                  << which << ',' << fmt17(z_re) << ',' << fmt17(z_im) << ',' << fmt17(c) << ','
                  << fmt17(sol.m.real()) << ',' << fmt17(sol.m.imag()) << ','
                  << fmt17(sol.residual) << ',' << sol.iterations << '\n';
    } else {
        std::cout << "m          = (" << fmt6(sol.m.real()) << ", " << fmt6(sol.m.imag()) << ")\n"
                  << "residual   = " << fmt6(sol.residual) << '\n'
                  << "iterations = " << sol.iterations << '\n';
    }
}

void cmd_density(const std::string& which, double c, const std::string& spectrum_text,
                 const std::string& grid_text, double epsilon, const std::string& out_path,
                 double tol, int max_iter) {
    ginv::SpectralLaw law;
    if (which == "plus") {
        law = ginv::SpectralLaw::plus;
    } else if (which == "minus") {
        law = ginv::SpectralLaw::minus;
    } else if (which == "mp") {
        law = ginv::SpectralLaw::mp;
    } else {
        throw ginv::validation_error("unknown density law '" + which +
                                     "' (expected plus|minus|mp)");
    }
    const ginv::SpectrumSpec spec = ginv::SpectrumSpec::parse(spectrum_text);
    const std::vector<double> xs = parse_grid_spec(grid_text);
    const auto points = ginv::density_grid(law, c, spec, xs, epsilon, {tol, max_iter});
    std::string payload = "x,density\n";
    std::size_t missing = 0;
    for (const auto& pt : points) {
        payload += fmt17(pt.x);
        payload += ',';
        payload += pt.ok ? fmt17(pt.density) : "nan";
        payload += '\n';
        if (!pt.ok) ++missing;
    }
    ginv::write_text_atomic(out_path, payload);
    std::cout << "wrote " << points.size() << " grid points to " << out_path;
    if (missing) std::cout << " (" << missing << " unconverged, marked nan)";
    std::cout << '\n';
}

void cmd_estimate(const std::string& input, Index n_override, const std::string& spectrum_text,
                  const CommonFlags& common) {
    Matrix y = ginv::read_matrix_file(input);
    if (n_override > 0) {
        if (n_override > y.cols()) {
            throw ginv::validation_error("--n exceeds the column count of the input file");
        }
        y = y.leftCols(n_override).eval();
    }
    const Index p = y.rows();
    const Index n = y.cols();
    if (p <= n) {
        throw ginv::validation_error(
            "estimate expects the singular regime p > n; got p = " + std::to_string(p) +
            ", n = " + std::to_string(n));
    }
    const double c_eff = static_cast<double>(p) / static_cast<double>(n);
    const Matrix s_plus = ginv::moore_penrose_inverse(y);
    const double trace_plus = s_plus.trace() / static_cast<double>(p);
    const double fro_plus = s_plus.squaredNorm() / static_cast<double>(p);

    std::optional<ginv::SpectrumSpec> spec;
    if (!spectrum_text.empty()) spec = ginv::SpectrumSpec::parse(spectrum_text);

    if (common.format == "csv") {
        std::string header = "p,n,c_eff,trace_plus,fro_plus";
        std::string row = std::to_string(p) + ',' + std::to_string(n) + ',' + fmt17(c_eff) + ',' +
                          fmt17(trace_plus) + ',' + fmt17(fro_plus);
        if (spec) {
            header += ",fro_plus_equiv,fro_minus_equiv,m_zero";
            row += ',' + fmt17(ginv::asymptotic_fro_plus(c_eff, *spec)) + ',' +
                   fmt17(ginv::asymptotic_fro_minus(c_eff, *spec)) + ',' +
                   fmt17(ginv::m_gram_zero(c_eff, *spec));
        }
        std::cout << header << '\n' << row << '\n';
    } else {
        std::cout << "p          = " << p << '\n'
                  << "n          = " << n << '\n'
                  << "c_eff      = " << fmt6(c_eff) << '\n'
                  << "trace_plus = " << fmt6(trace_plus) << "   # (1/p) tr(S+)\n"
                  << "fro_plus   = " << fmt6(fro_plus) << "   # (1/p) ||S+||_F^2\n";
        if (spec) {
            std::cout << "plug-in equivalents at c_eff for spectrum " << spec->to_string() << ":\n"
                      << "  fro_plus_equiv  = " << fmt6(ginv::asymptotic_fro_plus(c_eff, *spec))
                      << '\n'
                      << "  fro_minus_equiv = " << fmt6(ginv::asymptotic_fro_minus(c_eff, *spec))
                      << '\n'
                      << "  m_zero          = " << fmt6(ginv::m_gram_zero(c_eff, *spec)) << '\n';
        }
    }
}

void run_sweep_and_report(ginv::SweepConfig config, const CommonFlags& common) {
    config.threads = common.threads;
    const ginv::SweepResult result = ginv::run_sweep(config);
    int failed = 0;
    for (const auto& cell : result.summary) failed += cell.n_failed;
    std::cout << "rows    = " << result.rows.size() << '\n'
              << "cells   = " << result.summary.size() << '\n'
              << "failed  = " << failed << '\n';
    if (!config.output_path.empty()) {
        std::cout << "rows csv    = " << config.output_path << '\n'
                  << "summary csv = " << ginv::summary_path_for(config.output_path).string()
                  << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized inverses of singular sample covariance matrices"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; flags override its values");

    CommonFlags common;
    app.add_option("--format", common.format, "output format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();
    app.add_option("--threads", common.threads, "max worker threads (0 = hardware)")
        ->capture_default_str();

    // asymptotic
    auto* asymptotic = app.add_subcommand("asymptotic", "asymptotic Frobenius functionals");
    double asym_c = 0.0;
    std::string asym_spectrum = "1:1";
    std::string asym_sigma_file;
    asymptotic->add_option("--c", asym_c, "concentration ratio (> 1)")->required();
    asymptotic->add_option("--spectrum", asym_spectrum, "weight:eigenvalue,... population spectrum")
        ->capture_default_str();
    asymptotic->add_option("--sigma-file", asym_sigma_file,
                           "dense symmetric positive-definite Sigma (text matrix); overrides "
                           "--spectrum");
    asymptotic->callback([&] { cmd_asymptotic(asym_c, asym_spectrum, asym_sigma_file, common); });

    // stieltjes
    auto* stj = app.add_subcommand("stieltjes", "evaluate a limiting Stieltjes transform");
    std::string stj_which = "plus";
    double stj_zre = 0.0, stj_zim = 1.0, stj_c = 2.0, stj_tol = 1e-10;
    int stj_max_iter = 10000;
    std::string stj_spectrum = "1:1";
    stj->add_option("--which", stj_which, "plus|minus|mp|underline")->required();
    stj->add_option("--z-re", stj_zre, "Re z")->required();
    stj->add_option("--z-im", stj_zim, "Im z")->required();
    stj->add_option("--c", stj_c, "concentration ratio")->required();
    stj->add_option("--spectrum", stj_spectrum, "population spectrum (ignored for mp)")
        ->capture_default_str();
    stj->add_option("--tol", stj_tol, "fixed-point defect tolerance")->capture_default_str();
    stj->add_option("--max-iter", stj_max_iter, "iteration budget")->capture_default_str();
    stj->callback([&] {
        cmd_stieltjes(stj_which, stj_zre, stj_zim, stj_c, stj_spectrum, stj_tol, stj_max_iter,
                      common);
    });

    // density
    auto* dens = app.add_subcommand("density", "spectral density on a grid via inversion");
    std::string dens_which = "plus";
    double dens_c = 2.0, dens_eps = 1e-3, dens_tol = 1e-10;
    int dens_max_iter = 10000;
    std::string dens_spectrum = "1:1", dens_grid, dens_out;
    dens->add_option("--which", dens_which, "plus|minus|mp")->required();
    dens->add_option("--c", dens_c, "concentration ratio")->required();
    dens->add_option("--spectrum", dens_spectrum, "population spectrum")->capture_default_str();
    dens->add_option("--grid", dens_grid, "xmin:xmax:npts")->required();
    dens->add_option("--epsilon", dens_eps, "imaginary offset of the inversion line")
        ->capture_default_str();
    dens->add_option("--out", dens_out, "output CSV path")->required();
    dens->add_option("--tol", dens_tol, "solver tolerance")->capture_default_str();
    dens->add_option("--max-iter", dens_max_iter, "solver iteration budget")
        ->capture_default_str();
    dens->callback([&] {
        cmd_density(dens_which, dens_c, dens_spectrum, dens_grid, dens_eps, dens_out, dens_tol,
                    dens_max_iter);
    });

    // estimate
    auto* est = app.add_subcommand("estimate", "Moore-Penrose functionals of a data file");
    std::string est_input, est_spectrum;
    Index est_n = 0;
    est->add_option("--input", est_input, "p x n data matrix, whitespace separated")->required();
    est->add_option("--n", est_n, "use only the first n columns");
    est->add_option("--spectrum", est_spectrum,
                    "optional population spectrum for plug-in equivalents");
    est->callback([&] { cmd_estimate(est_input, est_n, est_spectrum, common); });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over (c, p) cells");
    std::string sweep_c = "2", sweep_p = "50:500:50", sweep_spectrum = "1:1",
                sweep_noise = "gaussian", sweep_out;
    int sweep_reps = 100;
    std::uint64_t sweep_seed = 42;
    sweep->add_option("--c-list", sweep_c, "comma list of concentration ratios")
        ->capture_default_str();
    sweep->add_option("--p-grid", sweep_p, "start:stop:step or comma list")
        ->capture_default_str();
    sweep->add_option("--reps", sweep_reps, "replications per cell")->capture_default_str();
    sweep->add_option("--spectrum", sweep_spectrum, "population spectrum")->capture_default_str();
    sweep->add_option("--noise", sweep_noise, "gaussian|rademacher|uniform-scaled")
        ->capture_default_str();
    sweep->add_option("--seed", sweep_seed, "master seed")->capture_default_str();
    sweep->add_option("--out", sweep_out, "rows CSV path")->required();
    sweep->callback([&] {
        ginv::SweepConfig config;
        config.c_list = parse_double_list(sweep_c);
        config.p_grid = parse_p_grid(sweep_p);
        config.replications = sweep_reps;
        config.spectrum = ginv::SpectrumSpec::parse(sweep_spectrum);
        config.noise = ginv::noise_from_string(sweep_noise);
        config.master_seed = sweep_seed;
        config.output_path = sweep_out;
        run_sweep_and_report(std::move(config), common);
    });

    // figure1
    auto* fig = app.add_subcommand("figure1", "shipped simulation preset");
    int fig_reps = 100;
    std::uint64_t fig_seed = 42;
    std::string fig_out;
    fig->add_option("--reps", fig_reps, "replications per cell")->capture_default_str();
    fig->add_option("--seed", fig_seed, "master seed")->capture_default_str();
    fig->add_option("--out", fig_out, "rows CSV path")->required();
    fig->callback([&] {
        ginv::SweepConfig config = ginv::figure1_preset();
        config.replications = fig_reps;
        config.master_seed = fig_seed;
        config.output_path = fig_out;
        run_sweep_and_report(std::move(config), common);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error kind=validation msg=\"" << e.what() << "\"\n";
        return 1;
    } catch (const ginv::validation_error& e) {
        std::cerr << "error kind=validation msg=\"" << e.what() << "\"\n";
        return 1;
    } catch (const ginv::numeric_error& e) {
        std::cerr << "error kind=numeric msg=\"" << e.what() << "\"\n";
        return 2;
    } catch (const ginv::io_error& e) {
        std::cerr << "error kind=io msg=\"" << e.what() << "\"\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error kind=internal msg=\"" << e.what() << "\"\n";
        return 2;
    }
    return 0;
}
