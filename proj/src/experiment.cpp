#include "manet/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace manet {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& file, int line) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(file, line, "expected a number, got '" + v + "'");
    }
}

long parse_int(const std::string& v, const std::string& file, int line) {
    try {
        size_t used = 0;
        long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(file, line, "expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& file, int line) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError(file, line, "expected on/off, got '" + v + "'");
}

RectRegion parse_region(const std::string& v, const std::string& file, int line) {
    size_t x = v.find('x');
    if (x == std::string::npos)
        throw ConfigError(file, line, "expected WIDTHxLENGTH, got '" + v + "'");
    double a = parse_double(v.substr(0, x), file, line);
    double b = parse_double(v.substr(x + 1), file, line);
    try {
        return RectRegion(a, b);
    } catch (const std::exception& e) {
        throw ConfigError(file, line, e.what());
    }
}

void apply_key_at(ScenarioConfig& cfg, const std::string& key, const std::string& value,
                  const std::string& file, int line) {
    // scenario
    if (key == "region_m") cfg.region = parse_region(value, file, line);
    else if (key == "nodes") cfg.node_count = static_cast<int>(parse_int(value, file, line));
    else if (key == "propagation") {
        if (value == "two_ray") cfg.propagation = PropagationModel::TwoRay;
        else if (value == "shadowing") cfg.propagation = PropagationModel::Shadowing;
        else throw ConfigError(file, line, "propagation must be two_ray or shadowing");
    }
    else if (key == "fading") {
        if (value == "per_frame") cfg.fading = FadingMode::PerFrame;
        else if (value == "per_link") cfg.fading = FadingMode::PerLink;
        else throw ConfigError(file, line, "fading must be per_frame or per_link");
    }
    else if (key == "duration_s") cfg.sim_duration = parse_double(value, file, line);
    else if (key == "connections") cfg.connections = static_cast<int>(parse_int(value, file, line));
    else if (key == "cbr_rate") cfg.cbr_rate = parse_double(value, file, line);
    else if (key == "payload_bytes")
        cfg.payload_bytes = static_cast<uint32_t>(parse_int(value, file, line));
    else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_int(value, file, line));
    // radio
    else if (key == "tx_power_dbm") cfg.radio.tx_power = PowerDbm{parse_double(value, file, line)};
    else if (key == "rx_threshold_dbm")
        cfg.radio.rx_threshold = PowerDbm{parse_double(value, file, line)};
    else if (key == "carrier_sense_dbm")
        cfg.radio.carrier_sense_threshold = PowerDbm{parse_double(value, file, line)};
    else if (key == "tx_gain") cfg.radio.tx_gain = parse_double(value, file, line);
    else if (key == "rx_gain") cfg.radio.rx_gain = parse_double(value, file, line);
    else if (key == "tx_height_m") cfg.radio.tx_height_m = parse_double(value, file, line);
    else if (key == "rx_height_m") cfg.radio.rx_height_m = parse_double(value, file, line);
    else if (key == "shadow_sigma_db") cfg.radio.shadow_sigma_db = parse_double(value, file, line);
    else if (key == "ref_distance_m") cfg.radio.ref_distance_m = parse_double(value, file, line);
    else if (key == "path_loss_exponent")
        cfg.radio.path_loss_exponent = parse_double(value, file, line);
    else if (key == "carrier_freq_hz") cfg.radio.carrier_freq_hz = parse_double(value, file, line);
    // mac
    else if (key == "slot_time_us") cfg.mac.slot_time = parse_double(value, file, line) * 1e-6;
    else if (key == "sifs_us") cfg.mac.sifs = parse_double(value, file, line) * 1e-6;
    else if (key == "difs_us") cfg.mac.difs = parse_double(value, file, line) * 1e-6;
    else if (key == "cw_min") cfg.mac.cw_min = static_cast<int>(parse_int(value, file, line));
    else if (key == "cw_max") cfg.mac.cw_max = static_cast<int>(parse_int(value, file, line));
    else if (key == "long_retry_limit")
        cfg.mac.long_retry_limit = static_cast<int>(parse_int(value, file, line));
    else if (key == "short_retry_limit")
        cfg.mac.short_retry_limit = static_cast<int>(parse_int(value, file, line));
    else if (key == "data_rate_bps") cfg.mac.data_rate_bps = parse_double(value, file, line);
    else if (key == "rts_threshold_bytes")
        cfg.mac.rts_threshold_bytes = static_cast<uint32_t>(parse_int(value, file, line));
    else if (key == "queue_capacity")
        cfg.mac.queue_capacity = static_cast<size_t>(parse_int(value, file, line));
    // dsr
    else if (key == "send_buffer_capacity")
        cfg.dsr.send_buffer_capacity = static_cast<size_t>(parse_int(value, file, line));
    else if (key == "send_buffer_timeout_s")
        cfg.dsr.send_buffer_timeout = parse_double(value, file, line);
    else if (key == "discovery_retry_initial_s")
        cfg.dsr.discovery_retry_initial = parse_double(value, file, line);
    else if (key == "discovery_retry_cap_s")
        cfg.dsr.discovery_retry_cap = parse_double(value, file, line);
    else if (key == "cache_reply") cfg.dsr.cache_reply = parse_bool(value, file, line);
    else throw ConfigError(file, line, "unknown key '" + key + "'");
}

std::string region_label(const ScenarioConfig& cfg) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%gx%g", cfg.region.length_d2, cfg.region.width_d1);
    return buf;
}

std::ofstream open_csv(const std::string& out_dir, const std::string& name) {
    std::filesystem::create_directories(out_dir);
    std::string path = out_dir + "/" + name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    return os;
}

void write_seed_detail(std::ofstream& os, const std::string& label, const ReplicatedReport& rep) {
    for (size_t i = 0; i < rep.runs.size(); ++i) {
        const MetricsReport& r = rep.runs[i];
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "%s,%zu,%llu,%llu,%.6f,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu\n",
                      label.c_str(), i, static_cast<unsigned long long>(r.n_sent),
                      static_cast<unsigned long long>(r.n_recvd), r.delivery_ratio(),
                      static_cast<unsigned long long>(r.data_drops.no_route),
                      static_cast<unsigned long long>(r.data_drops.link_break),
                      static_cast<unsigned long long>(r.data_drops.ifq),
                      static_cast<unsigned long long>(r.data_drops.misroute),
                      static_cast<unsigned long long>(r.frame_drops.subthreshold),
                      static_cast<unsigned long long>(r.frame_drops.collision),
                      static_cast<unsigned long long>(r.frame_drops.retry),
                      static_cast<unsigned long long>(r.rreq_sent),
                      static_cast<unsigned long long>(r.rrep_sent),
                      static_cast<unsigned long long>(r.rerr_sent));
        os << buf;
    }
}

constexpr const char* kSeedDetailSchema =
    "# columns: label,replication,n_sent,n_recvd,delivery_ratio,drop_no_route,"
    "drop_link_break,drop_ifq,drop_misroute,frame_subthreshold,frame_collision,"
    "frame_retry,rreq_sent,rrep_sent,rerr_sent\n";

void builtin_fig5(const std::string& out_dir) {
    // Mean link distance and hop count for the eight service areas, with a
    // 250 m nominal radio range for the hop estimate.
    constexpr double kHopRange = 250.0;
    auto os = open_csv(out_dir, "fig5.csv");
    os << "# columns: area_m2,d1_m,d2_m,mean_link_distance_m,hop_estimate\n";
    for (const ScenarioConfig& cfg : scenario_suite()) {
        auto stats = mean_link_distance(cfg.region);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.0f,%.0f,%.0f,%.4f,%d\n", cfg.region.area(),
                      cfg.region.width_d1, cfg.region.length_d2, stats.mean_distance,
                      hop_estimate(cfg.region, kHopRange));
        os << buf;
    }
}

void builtin_fig6(const std::string& out_dir) {
    RadioParams radio;
    auto os = open_csv(out_dir, "fig6.csv");
    os << "# columns: d_m,mean_pl_db,x_db,pdf\n";
    const double distances[] = {4.0, 40.0, 80.0, 186.0};
    for (double d : distances) {
        double mean = mean_path_loss_db(radio, d);
        double sigma = radio.shadow_sigma_db;
        for (int i = -16; i <= 16; ++i) {
            double x = mean + sigma * i / 4.0;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%.0f,%.4f,%.4f,%.8f\n", d, mean, x,
                          path_loss_pdf(radio, d, x));
            os << buf;
        }
    }
}

void builtin_fig7(const std::string& out_dir) {
    RadioParams radio;
    auto os = open_csv(out_dir, "fig7.csv");
    os << "# columns: d_m,area_pi_d2_m2,prob_above_threshold\n";
    for (int d = 1; d <= 250; ++d) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%d,%.2f,%.8f\n", d, M_PI * d * d,
                      prob_above_threshold(radio, d));
        os << buf;
    }
}

void builtin_fig8(const std::string& out_dir) {
    RadioParams radio;
    auto os = open_csv(out_dir, "fig8.csv");
    os << "# columns: d_m,pr_dbm_two_ray,pth_dbm\n";
    for (int d = 1; d <= 300; ++d) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%d,%.4f,%.2f\n", d,
                      received_power_tworay(radio, d).value, radio.rx_threshold.value);
        os << buf;
    }
}

void builtin_fig9(int n_seeds, const std::string& out_dir) {
    auto suite = scenario_suite();
    std::vector<ReplicatedReport> two_ray(suite.size()), shadow(suite.size());
    for (size_t i = 0; i < suite.size(); ++i) {
        ScenarioConfig cfg = suite[i];
        cfg.propagation = PropagationModel::TwoRay;
        two_ray[i] = run_replicated(cfg, n_seeds);
        cfg.propagation = PropagationModel::Shadowing;
        shadow[i] = run_replicated(cfg, n_seeds);
    }
    // Scale constant calibrated so the prediction matches the simulated
    // shadowing delivery ratio on the smallest area, then held fixed.
    RadioParams radio;
    double p0 = prob_above_threshold(radio, mean_link_distance(suite[0].region).mean_distance);
    double k = p0 > 0.0 ? shadow[0].delivery_mean / p0 : 0.0;

    auto os = open_csv(out_dir, "fig9.csv");
    char head[128];
    std::snprintf(head, sizeof(head), "# k = %.6g (calibrated on the smallest area)\n", k);
    os << "# columns: area_m2,dr_two_ray,dr_shadowing_mean,dr_shadowing_std,dr_predicted\n"
       << head;
    auto seeds_os = open_csv(out_dir, "fig9_seeds.csv");
    seeds_os << kSeedDetailSchema;
    for (size_t i = 0; i < suite.size(); ++i) {
        double predicted = k > 0.0 ? predicted_delivery_ratio(radio, suite[i].region, k) : 0.0;
        char buf[192];
        std::snprintf(buf, sizeof(buf), "%.0f,%.6f,%.6f,%.6f,%.6f\n", suite[i].region.area(),
                      two_ray[i].delivery_mean, shadow[i].delivery_mean, shadow[i].delivery_std,
                      predicted);
        os << buf;
        write_seed_detail(seeds_os, region_label(suite[i]) + "/two_ray", two_ray[i]);
        write_seed_detail(seeds_os, region_label(suite[i]) + "/shadowing", shadow[i]);
    }
}

void builtin_fig10(int n_seeds, const std::string& out_dir) {
    auto suite = scenario_suite();
    auto os = open_csv(out_dir, "fig10.csv");
    os << "# columns: area_m2,dr_baseline,dr_baseline_std,dr_high_power,dr_high_power_std,"
          "dr_retry12,dr_retry12_std\n";
    auto seeds_os = open_csv(out_dir, "fig10_seeds.csv");
    seeds_os << kSeedDetailSchema;
    for (const ScenarioConfig& base : suite) {
        ScenarioConfig cfg = base;
        cfg.propagation = PropagationModel::Shadowing;
        ReplicatedReport baseline = run_replicated(cfg, n_seeds);

        ScenarioConfig power = cfg;
        power.radio.tx_power = PowerDbm{27.67};
        ReplicatedReport high_power = run_replicated(power, n_seeds);

        ScenarioConfig retry = cfg;
        retry.mac.long_retry_limit = 12;
        ReplicatedReport retry12 = run_replicated(retry, n_seeds);

        char buf[224];
        std::snprintf(buf, sizeof(buf), "%.0f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      base.region.area(), baseline.delivery_mean, baseline.delivery_std,
                      high_power.delivery_mean, high_power.delivery_std, retry12.delivery_mean,
                      retry12.delivery_std);
        os << buf;
        write_seed_detail(seeds_os, region_label(base) + "/baseline", baseline);
        write_seed_detail(seeds_os, region_label(base) + "/high_power", high_power);
        write_seed_detail(seeds_os, region_label(base) + "/retry12", retry12);
    }
}

}  // namespace

void apply_config_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    apply_key_at(cfg, key, value, "<override>", 0);
}

ExperimentSpec parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    ExperimentSpec spec;
    std::string section;
    std::string line;
    int line_no = 0;
    int point_count = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[' && s.back() == ']') {
            section = trim(s.substr(1, s.size() - 2));
            if (section != "scenario" && section != "radio" && section != "mac" &&
                section != "dsr" && section != "sweep")
                throw ConfigError(path, line_no, "unknown section '" + section + "'");
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path, line_no, "expected key = value, got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));

        if (section.empty()) {
            if (key == "name") spec.name = value;
            else if (key == "seeds") spec.n_seeds = static_cast<int>(parse_int(value, path, line_no));
            else throw ConfigError(path, line_no, "unknown key '" + key + "' outside a section");
            continue;
        }
        if (section == "sweep") {
            if (key == "suite") {
                if (!parse_bool(value, path, line_no)) continue;
                for (const ScenarioConfig& cfg : scenario_suite()) {
                    SweepPoint p;
                    p.label = region_label(cfg);
                    char nodes[32];
                    std::snprintf(nodes, sizeof(nodes), "%d", cfg.node_count);
                    char region[64];
                    std::snprintf(region, sizeof(region), "%gx%g", cfg.region.length_d2,
                                  cfg.region.width_d1);
                    p.overrides = {{"region_m", region}, {"nodes", nodes}};
                    spec.sweep.push_back(std::move(p));
                }
            } else if (key == "point") {
                SweepPoint p;
                p.label = "point" + std::to_string(point_count++);
                std::istringstream tokens(value);
                std::string tok;
                while (tokens >> tok) {
                    size_t teq = tok.find('=');
                    if (teq == std::string::npos)
                        throw ConfigError(path, line_no, "sweep token '" + tok + "' needs key=value");
                    p.overrides.emplace_back(tok.substr(0, teq), tok.substr(teq + 1));
                }
                if (p.overrides.empty())
                    throw ConfigError(path, line_no, "empty sweep point");
                spec.sweep.push_back(std::move(p));
            } else {
                throw ConfigError(path, line_no, "unknown sweep key '" + key + "'");
            }
            continue;
        }
        apply_key_at(spec.base, key, value, path, line_no);
    }
    if (spec.n_seeds < 1) throw ConfigError(path, 0, "seeds must be >= 1");
    // Fail on invariant violations now, naming the file rather than a line.
    try {
        spec.base.validate();
        for (const SweepPoint& p : spec.sweep) resolve_point(spec, p).validate();
    } catch (const std::exception& e) {
        throw ConfigError(path, 0, e.what());
    }
    return spec;
}

ScenarioConfig resolve_point(const ExperimentSpec& spec, const SweepPoint& point) {
    ScenarioConfig cfg = spec.base;
    for (const auto& [key, value] : point.overrides) apply_config_key(cfg, key, value);
    return cfg;
}

void run_experiment(const ExperimentSpec& spec) {
    std::vector<SweepPoint> points = spec.sweep;
    if (points.empty()) points.push_back(SweepPoint{"base", {}});

    auto os = open_csv(spec.out_dir, spec.name + ".csv");
    os << "# columns: label,area_m2,d1_m,d2_m,nodes,propagation,tx_power_dbm,"
          "long_retry_limit,delivery_mean,delivery_std,n_runs\n";
    auto seeds_os = open_csv(spec.out_dir, spec.name + "_seeds.csv");
    seeds_os << kSeedDetailSchema;

    for (const SweepPoint& point : points) {
        ScenarioConfig cfg = resolve_point(spec, point);
        ReplicatedReport rep = run_replicated(cfg, spec.n_seeds);
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%.0f,%.0f,%.0f,%d,%s,%.2f,%d,%.6f,%.6f,%zu\n",
                      point.label.c_str(), cfg.region.area(), cfg.region.width_d1,
                      cfg.region.length_d2, cfg.node_count,
                      cfg.propagation == PropagationModel::TwoRay ? "two_ray" : "shadowing",
                      cfg.radio.tx_power.value, cfg.mac.long_retry_limit, rep.delivery_mean,
                      rep.delivery_std, rep.runs.size());
        os << buf;
        write_seed_detail(seeds_os, point.label, rep);
    }
}

void run_builtin(const std::string& which, int n_seeds, const std::string& out_dir) {
    if (n_seeds < 1) throw ConfigError("seeds must be >= 1");
    if (which == "fig5") builtin_fig5(out_dir);
    else if (which == "fig6") builtin_fig6(out_dir);
    else if (which == "fig7") builtin_fig7(out_dir);
    else if (which == "fig8") builtin_fig8(out_dir);
    else if (which == "fig9") builtin_fig9(n_seeds, out_dir);
    else if (which == "fig10") builtin_fig10(n_seeds, out_dir);
    else throw ConfigError("unknown builtin '" + which + "'");
}

}  // namespace manet
