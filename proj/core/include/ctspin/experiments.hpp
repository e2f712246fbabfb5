#pragma once

#include "ctspin/config.hpp"
#include "ctspin/io.hpp"

// Maps a validated config to a run: executes the named experiment and
// writes its CSV artifacts plus a manifest into the output directory.
namespace ctspin::experiments {

// Returns the manifest that was written. A runtime failure still writes
// a manifest (status "failed", partial outputs listed) before the
// exception propagates.
io::RunManifest run_experiment(const config::ExperimentConfig& cfg);

}  // namespace ctspin::experiments
