#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bubbledate.h"
#include "csvio.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;        // bad flags, bad data
constexpr int kExitUnavailable = 3;  // estimation finished with unavailable dates

struct VolDeleter {
    void operator()(bd_vol* v) const { bd_vol_free(v); }
};
using VolPtr = std::unique_ptr<bd_vol, VolDeleter>;

struct McDeleter {
    void operator()(bd_mc_result* r) const { bd_mc_free(r); }
};
using McPtr = std::unique_ptr<bd_mc_result, McDeleter>;

[[noreturn]] void die(const std::string& msg) {
    throw CLI::ValidationError(msg);
}

std::vector<double> parse_number_list(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            die("cannot parse number '" + item + "'");
        }
    }
    return out;
}

// Volatility flag syntax: const:S | onebreak:S0,S1,TAU | piecewise:F,S;F,S;...
VolPtr parse_vol(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    bd_vol* vol = nullptr;
    bd_status st;
    if (kind == "const") {
        const auto v = parse_number_list(args, ',');
        if (v.size() != 1) die("const volatility needs one value, e.g. const:1");
        st = bd_vol_constant(v[0], &vol);
    } else if (kind == "onebreak") {
        const auto v = parse_number_list(args, ',');
        if (v.size() != 3) die("onebreak volatility needs S0,S1,TAU, e.g. onebreak:1,5,0.2");
        st = bd_vol_onebreak(v[0], v[1], v[2], &vol);
    } else if (kind == "piecewise") {
        std::vector<double> fracs, sigmas;
        std::stringstream ss(args);
        std::string knot;
        while (std::getline(ss, knot, ';')) {
            const auto v = parse_number_list(knot, ',');
            if (v.size() != 2) die("piecewise knots are FRACTION,SIGMA pairs separated by ';'");
            fracs.push_back(v[0]);
            sigmas.push_back(v[1]);
        }
        if (fracs.empty()) die("piecewise volatility needs at least one knot");
        st = bd_vol_piecewise(fracs.data(), sigmas.data(), fracs.size(), &vol);
    } else {
        die("unknown volatility kind '" + kind + "' (const, onebreak, piecewise)");
    }
    if (st != BD_OK) die(bd_last_error());
    return VolPtr(vol);
}

struct KernelFlags {
    std::string kind = "epanechnikov";
    double power = 0.4;
    double bandwidth = 0.0;
    bool explicit_bandwidth = false;
    bool cross_validate = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--kernel", kind, "Smoothing kernel: epanechnikov or gaussian")
            ->check(CLI::IsMember({"epanechnikov", "gaussian"}))
            ->capture_default_str();
        cmd->add_option("--power", power,
                        "Bandwidth exponent p, giving b = T^(-p)")
            ->capture_default_str();
        auto* bw = cmd->add_option("--bandwidth", bandwidth, "Explicit bandwidth b > 0");
        auto* cv = cmd->add_flag("--cv", cross_validate,
                                 "Select the bandwidth by leave-one-out cross-validation");
        bw->excludes(cv);
        cmd->callback([this, bw] { explicit_bandwidth = bw->count() > 0; });
    }

    bd_kernel_spec resolve() const {
        bd_kernel_spec spec = bd_kernel_default();
        spec.kind = kind == "gaussian" ? BD_KERNEL_GAUSSIAN : BD_KERNEL_EPANECHNIKOV;
        if (explicit_bandwidth) {
            spec.rule = BD_BANDWIDTH_EXPLICIT;
            spec.value = bandwidth;
        } else if (cross_validate) {
            spec.rule = BD_BANDWIDTH_CROSS_VALIDATION;
            spec.value = 0.0;
        } else {
            spec.rule = BD_BANDWIDTH_FIXED_POWER;
            spec.value = power;
        }
        return spec;
    }

    std::string describe() const { return kind; }
};

json dates_to_json(const bd_dates& d, const char* method, bool dated,
                   const std::vector<bdcli::Date>* dates) {
    json j;
    j["method"] = method;
    const bool available = d.k_e >= 0 && d.k_c >= 0 && d.k_r >= 0;
    j["available"] = available;
    auto put = [&](const char* key, const char* tau_key, std::int64_t k, double tau) {
        if (k < 0) {
            j[key] = nullptr;
            j[tau_key] = nullptr;
            return;
        }
        if (dated && dates && k < static_cast<std::int64_t>(dates->size()))
            j[key] = bdcli::format_date((*dates)[static_cast<std::size_t>(k)]);
        else
            j[key] = k;
        j[tau_key] = tau;
    };
    put("k_e", "tau_e", d.k_e, d.tau_e);
    put("k_c", "tau_c", d.k_c, d.tau_c);
    put("k_r", "tau_r", d.k_r, d.tau_r);
    return j;
}

int cmd_simulate(std::int64_t T, double ca, double cb, const std::vector<double>& frac,
                 const std::string& vol_spec, std::uint64_t seed, double y0, double drift0,
                 double drift1, const std::string& output) {
    if (frac.size() != 3) die("--frac needs exactly three fractions, e.g. 0.4,0.6,0.7");
    const VolPtr vol = parse_vol(vol_spec);

    bd_sim_config cfg;
    cfg.T = T;
    cfg.y0 = y0;
    cfg.drift0 = drift0;
    cfg.drift1 = drift1;
    cfg.c_a = ca;
    cfg.c_b = cb;
    cfg.tau_e = frac[0];
    cfg.tau_c = frac[1];
    cfg.tau_r = frac[2];
    cfg.seed = seed;

    std::vector<double> y(static_cast<std::size_t>(T) + 1);
    std::vector<double> sigma(static_cast<std::size_t>(T));
    if (bd_simulate(&cfg, vol.get(), y.data(), sigma.data()) != BD_OK) die(bd_last_error());

    std::ofstream out(output);
    if (!out) die("cannot write '" + output + "'");
    bdcli::write_simulation_csv(out, y, sigma, seed);
    return kExitOk;
}

int cmd_estimate(const std::string& input, std::optional<int> year, bool log_transform,
                 double trim, const KernelFlags& kernel, const std::string& output) {
    bdcli::Table table = bdcli::read_table_file(input);

    std::vector<double> values;
    std::vector<bdcli::Date> window_dates;
    if (year) {
        const bdcli::YearSlice slice = bdcli::slice_year(table, *year);
        if (slice.leap)
            std::cerr << "warning: " << *year << " is a leap year; window has "
                      << slice.values.size() << " observations\n";
        values = slice.values;
        bdcli::Date d{*year, 1, 1};
        for (std::size_t i = 0; i < values.size(); ++i, d = bdcli::next_day(d))
            window_dates.push_back(d);
    } else {
        values = table.values;
        window_dates = table.dates;
    }
    if (values.size() < 41)
        throw bdcli::CsvError("window has " + std::to_string(values.size()) +
                              " observations; at least 41 are required");
    if (log_transform) {
        for (double& v : values) {
            if (!(v > 0.0))
                throw bdcli::CsvError("--log requires strictly positive values");
            v = std::log(v);
        }
    }

    const bd_kernel_spec spec = kernel.resolve();
    bd_estimate_result res;
    if (bd_estimate(values.data(), values.size(), trim, &spec, &res) != BD_OK)
        die(bd_last_error());

    json j;
    j["input"] = input;
    j["trim"] = trim;
    j["kernel"] = kernel.describe();
    j["transform"] = log_transform ? "log" : "raw";
    if (year) j["year"] = *year;
    if (table.has_seed) j["seed"] = table.seed;
    j["bandwidth"] = res.wls_failed ? json(nullptr) : json(res.bandwidth);
    const bool dated = table.dated;
    j["results"] = json::array({dates_to_json(res.ols, "ols", dated, &window_dates),
                                dates_to_json(res.wls, "wls", dated, &window_dates)});
    if (!res.wls_failed) {
        j["sigma2"] = {{"min", res.sigma2_min},
                       {"mean", res.sigma2_mean},
                       {"max", res.sigma2_max},
                       {"floor_applied", res.variance_floor_applied != 0}};
    }
    j["flags"] = {{"wls_failed", res.wls_failed != 0},
                  {"window_fallback", res.window_fallback != 0},
                  {"bandwidth_at_boundary", res.bandwidth_at_boundary != 0}};

    const std::string text = j.dump(2);
    std::cout << text << "\n";
    if (!output.empty()) {
        std::ofstream out(output);
        if (!out) die("cannot write '" + output + "'");
        out << text << "\n";
    }

    const bool ols_ok = res.ols.k_e >= 0 && res.ols.k_c >= 0 && res.ols.k_r >= 0;
    const bool wls_ok = res.wls.k_e >= 0 && res.wls.k_c >= 0 && res.wls.k_r >= 0;
    return ols_ok && wls_ok ? kExitOk : kExitUnavailable;
}

const char* target_name(bd_target t) {
    switch (t) {
        case BD_TARGET_EMERGE: return "k_e";
        case BD_TARGET_COLLAPSE: return "k_c";
        default: return "k_r";
    }
}

int cmd_mc(std::int64_t T, std::int64_t reps, double ca, double cb,
           const std::vector<double>& frac, const std::string& vol_spec, std::uint64_t seed,
           double trim, const KernelFlags& kernel, std::int64_t window, int threads,
           double y0, double drift0, double drift1, const std::string& outdir) {
    if (frac.size() != 3) die("--frac needs exactly three fractions, e.g. 0.4,0.6,0.7");
    const VolPtr vol = parse_vol(vol_spec);

    bd_mc_config cfg = bd_mc_default();
    cfg.T = T;
    cfg.reps = reps;
    cfg.c_a = ca;
    cfg.c_b = cb;
    cfg.tau_e = frac[0];
    cfg.tau_c = frac[1];
    cfg.tau_r = frac[2];
    cfg.y0 = y0;
    cfg.drift0 = drift0;
    cfg.drift1 = drift1;
    cfg.base_seed = seed;
    cfg.trim = trim;
    cfg.kernel = kernel.resolve();
    cfg.detection_window = window;
    cfg.threads = threads;

    bd_mc_result* raw = nullptr;
    if (bd_mc_run(&cfg, vol.get(), &raw) != BD_OK) die(bd_last_error());
    const McPtr result(raw);

    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) die("cannot create output directory '" + outdir + "'");

    const std::size_t nbins = bd_mc_num_bins(result.get());
    json summary;
    for (bd_target target : {BD_TARGET_EMERGE, BD_TARGET_COLLAPSE, BD_TARGET_RECOVER}) {
        std::vector<std::int64_t> ols_counts(nbins), wls_counts(nbins);
        std::int64_t dropped_ols = 0, dropped_wls = 0, total = 0;
        bd_mc_histogram(result.get(), BD_METHOD_OLS, target, ols_counts.data(), &dropped_ols,
                        &total);
        bd_mc_histogram(result.get(), BD_METHOD_WLS, target, wls_counts.data(), &dropped_wls,
                        nullptr);

        const std::string path =
            (std::filesystem::path(outdir) / ("hist_" + std::string(target_name(target)) + ".csv"))
                .string();
        std::ofstream out(path);
        if (!out) die("cannot write '" + path + "'");
        out << "bin_lower,bin_upper,count_ols,count_wls\n";
        char lo[32], hi[32];
        for (std::size_t i = 0; i < nbins; ++i) {
            std::snprintf(lo, sizeof(lo), "%.6f", static_cast<double>(i) * 0.01);
            std::snprintf(hi, sizeof(hi), "%.6f", static_cast<double>(i + 1) * 0.01);
            out << lo << ',' << hi << ',' << ols_counts[i] << ',' << wls_counts[i] << '\n';
        }

        for (bd_method method : {BD_METHOD_OLS, BD_METHOD_WLS}) {
            double freq = 0.0, mode = 0.0;
            std::int64_t dropped = 0;
            bd_mc_detection(result.get(), method, target, &freq, &mode, &dropped);
            summary[method == BD_METHOD_OLS ? "ols" : "wls"][target_name(target)] = {
                {"correct_freq", freq}, {"mode_bin", mode}, {"dropped", dropped}};
        }
        summary["total"] = total;
    }
    double elapsed = 0.0;
    bd_mc_elapsed_seconds(result.get(), &elapsed);
    summary["elapsed_seconds"] = elapsed;
    summary["config"] = {{"T", T},          {"reps", reps},   {"c_a", ca},
                         {"c_b", cb},       {"frac", frac},   {"vol", vol_spec},
                         {"seed", seed},    {"trim", trim},   {"kernel", kernel.describe()},
                         {"window", window}};

    const std::string spath = (std::filesystem::path(outdir) / "summary.json").string();
    std::ofstream sout(spath);
    if (!sout) die("cannot write '" + spath + "'");
    sout << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bubble break-date estimation: simulation, estimation and Monte Carlo"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "INI config file; put mc options under an [mc] section");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic four-regime path as CSV");
    std::int64_t sim_T = 0;
    double sim_ca = 6.0, sim_cb = 6.0, sim_y0 = 1500.0;
    double sim_drift0 = 1.0 / 800.0, sim_drift1 = 1.0 / 800.0;
    std::vector<double> sim_frac{0.4, 0.6, 0.7};
    std::string sim_vol = "const:1";
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    sim->add_option("--T", sim_T, "Sample size")->required();
    sim->add_option("--ca", sim_ca, "Explosive-root constant, phi_a = 1 + ca/T")
        ->capture_default_str();
    sim->add_option("--cb", sim_cb, "Collapse-root constant, phi_b = 1 - cb/T")
        ->capture_default_str();
    sim->add_option("--frac", sim_frac, "Break fractions tau_e,tau_c,tau_r")
        ->delimiter(',')
        ->expected(3);
    sim->add_option("--vol", sim_vol,
                    "Volatility: const:S | onebreak:S0,S1,TAU | piecewise:F,S;F,S;...")
        ->capture_default_str();
    sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    sim->add_option("--y0", sim_y0, "Initial value")->capture_default_str();
    sim->add_option("--drift0", sim_drift0, "Per-step drift in the first regime")
        ->capture_default_str();
    sim->add_option("--drift1", sim_drift1, "Per-step drift in the last regime")
        ->capture_default_str();
    sim->add_option("-o,--output", sim_out, "Output CSV path")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate bubble dates from a CSV series");
    std::string est_input, est_out;
    int est_year_raw = 0;
    bool est_log = false;
    double est_trim = 0.05;
    KernelFlags est_kernel;
    auto* year_opt = est->add_option("--year", est_year_raw,
                                     "Slice one calendar year from a dated input");
    est->add_option("input", est_input, "Input CSV (date,value or t,value or t,y,sigma)")
        ->required();
    est->add_flag("--log", est_log, "Work on the log of the values");
    est->add_option("--trim", est_trim, "Edge fraction excluded from each search range")
        ->capture_default_str();
    est_kernel.add_to(est);
    est->add_option("-o,--output", est_out, "Also write the result JSON to this path");

    // mc
    auto* mc = app.add_subcommand("mc", "Run a Monte Carlo experiment");
    std::int64_t mc_T = 400, mc_reps = 5000, mc_window = 0;
    double mc_ca = 6.0, mc_cb = 6.0, mc_trim = 0.05, mc_y0 = 1500.0;
    double mc_drift0 = 1.0 / 800.0, mc_drift1 = 1.0 / 800.0;
    std::vector<double> mc_frac{0.4, 0.6, 0.7};
    std::string mc_vol = "const:1", mc_outdir;
    std::uint64_t mc_seed = 0;
    int mc_threads = 0;
    KernelFlags mc_kernel;
    mc->add_option("--T", mc_T, "Sample size")->capture_default_str();
    mc->add_option("--reps", mc_reps, "Number of replications")->capture_default_str();
    mc->add_option("--ca", mc_ca, "Explosive-root constant")->capture_default_str();
    mc->add_option("--cb", mc_cb, "Collapse-root constant")->capture_default_str();
    mc->add_option("--frac", mc_frac, "Break fractions tau_e,tau_c,tau_r")
        ->delimiter(',')
        ->expected(3);
    mc->add_option("--vol", mc_vol, "Volatility profile (see simulate --help)")
        ->capture_default_str();
    mc->add_option("--seed", mc_seed, "Base seed; replication r uses a seed derived from it")
        ->capture_default_str();
    mc->add_option("--trim", mc_trim, "Edge trimming fraction")->capture_default_str();
    mc_kernel.add_to(mc);
    mc->add_option("--window", mc_window, "Detection tolerance |k_hat - k| <= window")
        ->capture_default_str();
    mc->add_option("--threads", mc_threads, "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();
    mc->add_option("--y0", mc_y0, "Initial value")->capture_default_str();
    mc->add_option("--drift0", mc_drift0, "Per-step drift, first regime")->capture_default_str();
    mc->add_option("--drift1", mc_drift1, "Per-step drift, last regime")->capture_default_str();
    mc->add_option("-o,--outdir", mc_outdir, "Directory for histogram CSVs and summary JSON")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_T, sim_ca, sim_cb, sim_frac, sim_vol, sim_seed, sim_y0,
                                sim_drift0, sim_drift1, sim_out);
        if (est->parsed()) {
            std::optional<int> year;
            if (year_opt->count() > 0) year = est_year_raw;
            return cmd_estimate(est_input, year, est_log, est_trim, est_kernel, est_out);
        }
        if (mc->parsed())
            return cmd_mc(mc_T, mc_reps, mc_ca, mc_cb, mc_frac, mc_vol, mc_seed, mc_trim,
                          mc_kernel, mc_window, mc_threads, mc_y0, mc_drift0, mc_drift1,
                          mc_outdir);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const bdcli::CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
