#pragma once

namespace vlft {

// Worker count to use: `requested` if positive, else the VLFT_THREADS
// environment variable, else the OpenMP default (1 without OpenMP).
int effective_threads(int requested = 0);

}  // namespace vlft
