#pragma once

#include <ostream>
#include <string>

#include "spine/config.hpp"

namespace spine {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfig = 2 };

/// Runs one of simulate | compare | eigen | phase | odelimit, writing CSV
/// files under cfg.output.dir and messages to `log`. Library errors are
/// reported on `log` and mapped to kExitConfig.
int run_command(const std::string& command, const ExperimentConfig& cfg,
                std::ostream& log);

/// psi built from its configuration; eigen-h and custom-tabulated need a
/// capacity-bounded model.
PsiFunction make_psi(const PsiSpec& spec, const ModelSpec& model,
                     std::size_t stateLimit = 200000);

}  // namespace spine
