#ifndef COPULASIM_COMMANDS_HPP
#define COPULASIM_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>

namespace copulasim::cli {

// Exit codes: 0 success (including non-converged fits), 2 config error,
// 3 data inconsistency, 4 numerical infeasibility.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInfeasible = 4;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> reps;
    std::optional<std::string> out_dir;
};

int cmd_gen_data(const std::string& config_path, const Overrides& ov);
int cmd_fit(const std::string& config_path, const Overrides& ov);
int cmd_simulate(const std::string& config_path, const Overrides& ov);
int cmd_report(const std::string& config_path, const Overrides& ov);

}  // namespace copulasim::cli

#endif
