#pragma once

namespace soliton_lab::cli {

// Entry point of the soliton-lab tool. Exit codes: 0 success, 1 numerical
// or I/O failure (error JSON on stderr and in the output directory), 2 usage.
int run(int argc, const char* const* argv);

}  // namespace soliton_lab::cli
