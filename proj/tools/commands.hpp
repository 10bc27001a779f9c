#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace cli {

// Each command writes its artifacts under output_dir(c), prints a short JSON
// summary on stdout and returns the process exit code. Errors propagate as
// exceptions; main() turns them into error JSON and exit codes 2/3.
int cmd_simulate(RunConfig c);
int cmd_lyapunov(RunConfig c);
int cmd_fourier(RunConfig c);
int cmd_pca(RunConfig c);
int cmd_volume(RunConfig c);
int cmd_perturb(RunConfig c);
int cmd_classify(RunConfig c);
int cmd_epochs(RunConfig c);
int cmd_plot(RunConfig c, const std::vector<std::string>& inputs);

}  // namespace cli
