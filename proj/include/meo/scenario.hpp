#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace meo {

// Radio-side constants.  pilot_len / pilot_overhead are derived during
// scenario construction (tau_u = K users per cell, nu = (tau_c - tau_u)/tau_c).
struct RadioConstants {
    double bandwidth_hz = 5e6;       // B
    int antennas = 100;              // N
    double cap_gap_ul = 1.25;        // Gamma_1 >= 1
    double cap_gap_dl = 1.25;        // Gamma_2 >= 1
    double coherence_samples = 1e5;  // tau_c
    double noise_ap_w = 1.995262314968880e-16;  // sigma_r^2, -127 dBm
    double noise_ut_w = 6.309573444801930e-16;  // sigma_i^2, -122 dBm
    double ap_power_w = 39.810717055349734;     // P, 46 dBm
    double ut_power_max_w = 0.199526231496888;  // 23 dBm
    double output_ratio = 2.0;       // mu, downlink bits per offloaded bit
    double pathloss_exp = 2.2;       // gamma
    double shadow_std_db = 2.7;      // sigma
    // Reference channel gain at 1 m; multiplies d^-gamma.  The large-scale
    // model is beta = pathloss_ref * S_sigma * d^-gamma with d in meters.
    double pathloss_ref = 1.5e-15;

    int pilot_len = 0;          // tau_u (derived, equals per-cell user count)
    double pilot_overhead = 1.0; // nu (derived)
};

struct ComputeConstants {
    double kappa_user = 9e-32;   // J / (cycle Hz^2), per-user switched capacitance
    double cycles_user = 1000.0; // c_i, CPU cycles per input bit
    double kappa_mec = 9e-31;    // kappa_m
    double cycles_mec = 500.0;   // d_m
    double f_user_min = 60e6;
    double f_user_max = 1.8e9;
    double f_mec_min = 2.2e9;
    double f_mec_max = 81.6e9;   // 24 cores x 3.4 GHz
    double weight_w = 1e-3;      // w in the (1-w) E_u + w E_m objective
    double latency_s = 20e-3;    // T_d
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};

struct User {
    Position pos;
    int home_cell = 0;
    double request_bits = 0.0; // u_i
};

struct NetworkScenario {
    std::vector<Position> aps;
    std::vector<User> users;
    RadioConstants radio;
    ComputeConstants compute;
    // contaminating[l] = cells sharing pilots with cell l (home cell excluded)
    std::vector<std::vector<int>> contaminating;
    double area_m = 20.0;
    double min_separation_m = 3.0;

    int num_cells() const { return static_cast<int>(aps.size()); }
    int num_users() const { return static_cast<int>(users.size()); }
    int users_per_cell() const;
    std::vector<int> cell_members(int cell) const;
    int pilot_index(int user) const; // index of the user within its home cell
    double distance(int cell, int user) const;
};

enum class CsiMode { perfect, contaminated };

const char* to_string(CsiMode m);
CsiMode csi_mode_from_string(const std::string& s);

// One Monte-Carlo draw of the large-scale quantities that stay fixed during
// optimization.  Indexed [cell][global user] for links, [global user] for
// per-user home quantities.
struct ChannelRealization {
    CsiMode mode = CsiMode::perfect;
    std::vector<std::vector<double>> beta;      // beta[l][g]
    std::vector<std::vector<double>> gamma_est; // mean-square channel estimate at AP l of user g
    std::vector<double> gamma_home;             // gamma_est at the home AP
    std::vector<double> sigma1_sq;              // uplink I+N power per user
    std::vector<double> sigma2_sq;              // downlink I+N power per user
};

// Scenario description; either an explicit layout (aps + users non-empty) or
// a generated one (aps placed on a grid of cells, users uniform per cell).
struct ScenarioConfig {
    RadioConstants radio;
    ComputeConstants compute;
    double area_m = 20.0;
    double min_separation_m = 3.0;
    int num_aps = 4;              // generated layout: 1 or 4 supported
    int users_per_cell = 4;
    double request_bits = 20e3;   // uniform u_i for generated users
    std::uint64_t layout_seed = 1;
    std::vector<Position> aps;    // explicit layout (optional)
    std::vector<User> users;      // explicit layout (optional)
    // empty => frequency reuse 1: every other cell contaminates
    std::vector<std::vector<int>> contaminating;
};

// Builds and validates a scenario.  Deterministic given the config seed.
// Throws std::invalid_argument on any violated invariant.
NetworkScenario build_scenario(const ScenarioConfig& cfg);

// The default experiment setup: 20m x 20m, 4 APs, K users per cell,
// N = 100, B = 5 MHz, T_d = 20 ms, w = 1e-3.
ScenarioConfig reference_config(int users_per_cell = 4, std::uint64_t layout_seed = 1);

ScenarioConfig scenario_config_from_json(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::string& path);

// Draws shadowing and channel-estimate quality, then assembles the
// interference-plus-noise powers with interferer powers fixed (interfering
// users at full uplink power, interfering APs at equal downlink allocation).
ChannelRealization draw_channel(const NetworkScenario& scn, std::uint64_t seed, CsiMode mode);

// Recomputes sigma1/sigma2 from the realization's large-scale state.  Cross-
// cell powers stay at their fixed values and the model excludes home-cell
// self-interference, so this is stable under home power updates.
void refresh_interference(const NetworkScenario& scn, ChannelRealization& ch);

} // namespace meo
