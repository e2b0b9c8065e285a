#include "meo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "meo/units.hpp"
#include <json.hpp>

namespace meo {

int NetworkScenario::users_per_cell() const {
    if (aps.empty()) return 0;
    return static_cast<int>(users.size()) / static_cast<int>(aps.size());
}

std::vector<int> NetworkScenario::cell_members(int cell) const {
    std::vector<int> out;
    for (int g = 0; g < num_users(); ++g)
        if (users[g].home_cell == cell) out.push_back(g);
    return out;
}

int NetworkScenario::pilot_index(int user) const {
    int idx = 0;
    for (int g = 0; g < user; ++g)
        if (users[g].home_cell == users[user].home_cell) ++idx;
    return idx;
}

double NetworkScenario::distance(int cell, int user) const {
    double dx = aps[cell].x - users[user].pos.x;
    double dy = aps[cell].y - users[user].pos.y;
    return std::sqrt(dx * dx + dy * dy);
}

const char* to_string(CsiMode m) {
    return m == CsiMode::perfect ? "perfect" : "contaminated";
}

CsiMode csi_mode_from_string(const std::string& s) {
    if (s == "perfect") return CsiMode::perfect;
    if (s == "contaminated") return CsiMode::contaminated;
    throw std::invalid_argument("unknown csi mode: " + s);
}

namespace {

void validate(const NetworkScenario& scn) {
    const auto& r = scn.radio;
    const auto& c = scn.compute;
    if (scn.aps.empty()) throw std::invalid_argument("scenario: no access points");
    if (scn.users.empty()) throw std::invalid_argument("scenario: no users");
    if (r.bandwidth_hz <= 0 || r.antennas <= 0)
        throw std::invalid_argument("scenario: bandwidth and antenna count must be positive");
    if (r.cap_gap_ul < 1.0 || r.cap_gap_dl < 1.0)
        throw std::invalid_argument("scenario: capacity gaps must be >= 1");
    if (r.noise_ap_w <= 0 || r.noise_ut_w <= 0 || r.ap_power_w <= 0 || r.ut_power_max_w <= 0)
        throw std::invalid_argument("scenario: powers must be strictly positive");
    if (r.output_ratio <= 0) throw std::invalid_argument("scenario: output ratio mu must be > 0");
    if (r.pathloss_ref <= 0) throw std::invalid_argument("scenario: pathloss_ref must be > 0");
    if (c.weight_w < 0.0 || c.weight_w > 1.0)
        throw std::invalid_argument("scenario: weight w outside [0,1]");
    if (c.f_user_min >= c.f_user_max || c.f_mec_min >= c.f_mec_max)
        throw std::invalid_argument("scenario: frequency bounds out of order");
    if (c.latency_s <= 0) throw std::invalid_argument("scenario: latency must be positive");

    const int L = scn.num_cells();
    int per_cell = -1;
    for (int l = 0; l < L; ++l) {
        int k = static_cast<int>(scn.cell_members(l).size());
        if (k == 0) throw std::invalid_argument("scenario: empty cell");
        if (per_cell < 0) per_cell = k;
        else if (k != per_cell)
            throw std::invalid_argument("scenario: cells must have equal user counts (shared pilot book)");
    }
    if (r.pilot_len != per_cell)
        throw std::invalid_argument("scenario: pilot length must equal the per-cell user count");
    if (r.coherence_samples <= r.pilot_len)
        throw std::invalid_argument("scenario: coherence interval shorter than pilot transmission");

    for (int g = 0; g < scn.num_users(); ++g) {
        const auto& u = scn.users[g];
        if (u.request_bits <= 0)
            throw std::invalid_argument("scenario: data request must be positive");
        if (u.home_cell < 0 || u.home_cell >= L)
            throw std::invalid_argument("scenario: user outside any home cell");
        if (u.pos.x < 0 || u.pos.x > scn.area_m || u.pos.y < 0 || u.pos.y > scn.area_m)
            throw std::invalid_argument("scenario: user outside the deployment area");
        for (int l = 0; l < L; ++l)
            if (scn.distance(l, g) < scn.min_separation_m)
                throw std::invalid_argument("scenario: user closer to an AP than the minimum separation");
    }
    for (int l = 0; l < L; ++l)
        for (int q : scn.contaminating[l])
            if (q == l || q < 0 || q >= L)
                throw std::invalid_argument("scenario: malformed contaminating set");
}

std::vector<Position> default_ap_grid(int num_aps, double area) {
    if (num_aps == 1) return {{area / 2.0, area / 2.0}};
    if (num_aps == 4) {
        double q = area / 4.0;
        return {{q, q}, {3 * q, q}, {q, 3 * q}, {3 * q, 3 * q}};
    }
    throw std::invalid_argument("generated layouts support 1 or 4 APs; pass explicit positions otherwise");
}

} // namespace

NetworkScenario build_scenario(const ScenarioConfig& cfg) {
    NetworkScenario scn;
    scn.radio = cfg.radio;
    scn.compute = cfg.compute;
    scn.area_m = cfg.area_m;
    scn.min_separation_m = cfg.min_separation_m;

    if (!cfg.aps.empty()) {
        scn.aps = cfg.aps;
        scn.users = cfg.users;
    } else {
        scn.aps = default_ap_grid(cfg.num_aps, cfg.area_m);
        std::mt19937_64 rng(cfg.layout_seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        // users uniform in their AP's quadrant, rejecting positions closer
        // than the minimum separation to any AP
        double half = cfg.area_m / (cfg.num_aps == 1 ? 1.0 : 2.0);
        for (int l = 0; l < static_cast<int>(scn.aps.size()); ++l) {
            double x0 = (cfg.num_aps == 4 && (l % 2 == 1)) ? half : 0.0;
            double y0 = (cfg.num_aps == 4 && l >= 2) ? half : 0.0;
            for (int k = 0; k < cfg.users_per_cell; ++k) {
                Position p;
                for (int tries = 0; tries < 10000; ++tries) {
                    p.x = x0 + unit(rng) * half;
                    p.y = y0 + unit(rng) * half;
                    bool ok = true;
                    for (const auto& ap : scn.aps) {
                        double dx = ap.x - p.x, dy = ap.y - p.y;
                        if (std::sqrt(dx * dx + dy * dy) < cfg.min_separation_m) { ok = false; break; }
                    }
                    if (ok) break;
                }
                scn.users.push_back({p, l, cfg.request_bits});
            }
        }
    }

    const int L = scn.num_cells();
    if (!cfg.contaminating.empty()) {
        scn.contaminating = cfg.contaminating;
    } else {
        scn.contaminating.assign(L, {});
        for (int l = 0; l < L; ++l)
            for (int q = 0; q < L; ++q)
                if (q != l) scn.contaminating[l].push_back(q);
    }

    scn.radio.pilot_len = scn.users_per_cell();
    scn.radio.pilot_overhead =
        (scn.radio.coherence_samples - scn.radio.pilot_len) / scn.radio.coherence_samples;

    validate(scn);
    return scn;
}

ScenarioConfig reference_config(int users_per_cell, std::uint64_t layout_seed) {
    ScenarioConfig cfg;
    cfg.users_per_cell = users_per_cell;
    cfg.layout_seed = layout_seed;
    return cfg;
}

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

ScenarioConfig scenario_config_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    ScenarioConfig cfg;
    if (j.contains("radio")) {
        const auto& r = j["radio"];
        maybe(r, "bandwidth_hz", cfg.radio.bandwidth_hz);
        maybe(r, "antennas", cfg.radio.antennas);
        maybe(r, "cap_gap_ul", cfg.radio.cap_gap_ul);
        maybe(r, "cap_gap_dl", cfg.radio.cap_gap_dl);
        maybe(r, "coherence_samples", cfg.radio.coherence_samples);
        if (r.contains("noise_ap_dbm")) cfg.radio.noise_ap_w = dbm_to_watt(r["noise_ap_dbm"].get<double>());
        if (r.contains("noise_ut_dbm")) cfg.radio.noise_ut_w = dbm_to_watt(r["noise_ut_dbm"].get<double>());
        if (r.contains("ap_power_dbm")) cfg.radio.ap_power_w = dbm_to_watt(r["ap_power_dbm"].get<double>());
        if (r.contains("ut_power_max_dbm")) cfg.radio.ut_power_max_w = dbm_to_watt(r["ut_power_max_dbm"].get<double>());
        maybe(r, "noise_ap_w", cfg.radio.noise_ap_w);
        maybe(r, "noise_ut_w", cfg.radio.noise_ut_w);
        maybe(r, "ap_power_w", cfg.radio.ap_power_w);
        maybe(r, "ut_power_max_w", cfg.radio.ut_power_max_w);
        maybe(r, "output_ratio", cfg.radio.output_ratio);
        maybe(r, "pathloss_exp", cfg.radio.pathloss_exp);
        maybe(r, "shadow_std_db", cfg.radio.shadow_std_db);
        maybe(r, "pathloss_ref", cfg.radio.pathloss_ref);
    }
    if (j.contains("compute")) {
        const auto& c = j["compute"];
        maybe(c, "kappa_user", cfg.compute.kappa_user);
        maybe(c, "cycles_user", cfg.compute.cycles_user);
        maybe(c, "kappa_mec", cfg.compute.kappa_mec);
        maybe(c, "cycles_mec", cfg.compute.cycles_mec);
        maybe(c, "f_user_min", cfg.compute.f_user_min);
        maybe(c, "f_user_max", cfg.compute.f_user_max);
        maybe(c, "f_mec_min", cfg.compute.f_mec_min);
        maybe(c, "f_mec_max", cfg.compute.f_mec_max);
        maybe(c, "weight_w", cfg.compute.weight_w);
        maybe(c, "latency_s", cfg.compute.latency_s);
    }
    if (j.contains("layout")) {
        const auto& l = j["layout"];
        maybe(l, "area_m", cfg.area_m);
        maybe(l, "min_separation_m", cfg.min_separation_m);
        maybe(l, "num_aps", cfg.num_aps);
        maybe(l, "users_per_cell", cfg.users_per_cell);
        maybe(l, "request_bits", cfg.request_bits);
        maybe(l, "seed", cfg.layout_seed);
        if (l.contains("aps"))
            for (const auto& p : l["aps"])
                cfg.aps.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        if (l.contains("users"))
            for (const auto& u : l["users"])
                cfg.users.push_back({{u.at("x").get<double>(), u.at("y").get<double>()},
                                     u.at("cell").get<int>(),
                                     u.at("request_bits").get<double>()});
    }
    if (j.contains("contaminating"))
        cfg.contaminating = j["contaminating"].get<std::vector<std::vector<int>>>();
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_config_from_json(ss.str());
}

ChannelRealization draw_channel(const NetworkScenario& scn, std::uint64_t seed, CsiMode mode) {
    const int L = scn.num_cells();
    const int G = scn.num_users();
    const auto& r = scn.radio;

    ChannelRealization ch;
    ch.mode = mode;
    ch.beta.assign(L, std::vector<double>(G, 0.0));
    ch.gamma_est.assign(L, std::vector<double>(G, 0.0));

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> shadow(0.0, r.shadow_std_db);
    for (int l = 0; l < L; ++l)
        for (int g = 0; g < G; ++g) {
            double s_db = (r.shadow_std_db > 0.0) ? shadow(rng) : 0.0;
            ch.beta[l][g] = r.pathloss_ref * db_to_linear(s_db) *
                            std::pow(scn.distance(l, g), -r.pathloss_exp);
        }

    if (mode == CsiMode::perfect) {
        ch.gamma_est = ch.beta;
    } else {
        // MMSE estimate quality under pilot reuse: same-pilot users of the
        // contaminating cells share the pilot observation at each AP
        const double tp = r.pilot_len * r.ut_power_max_w; // tau_u * pilot power
        for (int l = 0; l < L; ++l) {
            for (int p = 0; p < scn.radio.pilot_len; ++p) {
                std::vector<int> sharers;
                auto add_cell = [&](int q) {
                    auto members = scn.cell_members(q);
                    if (p < static_cast<int>(members.size())) sharers.push_back(members[p]);
                };
                add_cell(l);
                for (int q : scn.contaminating[l]) add_cell(q);
                double den = r.noise_ap_w;
                for (int g : sharers) den += tp * ch.beta[l][g];
                for (int g : sharers)
                    ch.gamma_est[l][g] = tp * ch.beta[l][g] * ch.beta[l][g] / den;
            }
        }
    }

    ch.gamma_home.assign(G, 0.0);
    for (int g = 0; g < G; ++g) ch.gamma_home[g] = ch.gamma_est[scn.users[g].home_cell][g];

    refresh_interference(scn, ch);
    return ch;
}

void refresh_interference(const NetworkScenario& scn, ChannelRealization& ch) {
    const int L = scn.num_cells();
    const int G = scn.num_users();
    const auto& r = scn.radio;
    const double p_fix = r.ut_power_max_w; // interfering users at max power

    ch.sigma1_sq.assign(G, 0.0);
    ch.sigma2_sq.assign(G, 0.0);

    for (int g = 0; g < G; ++g) {
        const int l = scn.users[g].home_cell;
        const int pil = scn.pilot_index(g);

        // uplink: receiver noise + interference from every other cell's users,
        // plus coherent interference from same-pilot users of contaminating
        // cells when estimates are pilot-contaminated
        double s1 = r.noise_ap_w;
        for (int q = 0; q < L; ++q) {
            if (q == l) continue;
            for (int g2 : scn.cell_members(q)) s1 += ch.beta[l][g2] * p_fix;
        }
        if (ch.mode == CsiMode::contaminated) {
            for (int q : scn.contaminating[l]) {
                auto members = scn.cell_members(q);
                if (pil < static_cast<int>(members.size()))
                    s1 += r.antennas * ch.gamma_est[l][members[pil]] * p_fix;
            }
        }
        ch.sigma1_sq[g] = s1;

        // downlink: terminal noise + interference from other APs (equal power
        // allocation, coefficients sum to 1), plus coherent interference from
        // contaminating APs beamforming to this user's pilot twin
        double s2 = r.noise_ut_w;
        for (int q = 0; q < L; ++q) {
            if (q == l) continue;
            s2 += r.ap_power_w * ch.beta[q][g];
        }
        if (ch.mode == CsiMode::contaminated) {
            for (int q : scn.contaminating[l]) {
                int kq = static_cast<int>(scn.cell_members(q).size());
                if (pil < kq)
                    s2 += r.antennas * r.ap_power_w * ch.gamma_est[q][g] / kq;
            }
        }
        ch.sigma2_sq[g] = s2;
    }
}

} // namespace meo
