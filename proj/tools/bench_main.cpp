// Compares the OpenMP kernels against their serial reference implementations:
// grid stepping, ensemble enumeration, and the subset search.

#include <chrono>
#include <cstdio>
#include <string>

#include "ispt/search.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace ispt;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void report(const std::string& name, double serial_s, double parallel_s) {
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx\n", name.c_str(),
                serial_s, parallel_s, serial_s / parallel_s);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns are serial\n");
#endif
    const GridDims dims{4, 4};
    const LifeEngine engine(dims);

    {
        // Step all 65536 states many times through both engines.
        const int reps = 200;
        volatile std::uint32_t sink = 0;
        auto t0 = clock_type::now();
        for (int i = 0; i < reps; ++i)
            for (std::uint32_t s = 0; s < (1u << 16); ++s)
                sink ^= engine.step_reference(BitState{s}).bits;
        const double ref = seconds_since(t0);
        t0 = clock_type::now();
        for (int i = 0; i < reps; ++i)
            for (std::uint32_t s = 0; s < (1u << 16); ++s)
                sink ^= engine.step(BitState{s}).bits;
        const double fast = seconds_since(t0);
        report("life step (13.1M states)", ref, fast);
    }

    {
        auto t0 = clock_type::now();
        const EnsembleTable a = build_ensemble_serial(dims, 8, 3);
        const double ref = seconds_since(t0);
        t0 = clock_type::now();
        const EnsembleTable b = build_ensemble(dims, 8, 3);
        const double fast = seconds_since(t0);
        if (a.entries().size() != b.entries().size()) {
            std::printf("ensemble mismatch between serial and parallel builds\n");
            return 1;
        }
        report("ensemble build (2^16)", ref, fast);
    }

    {
        // Subset search on a small instance where the per-candidate slow path
        // is still tractable: n=15 gives 16^3 = 4096 candidates.
        const EnsembleTable tab = build_ensemble(dims, 8, 3);
        const SubsetPatternSpec spec{tab.unpack(tab.entries().back().key), 15};
        auto t0 = clock_type::now();
        const auto slow = search_subsets_reference(tab, spec, Objective::maximize);
        const double ref = seconds_since(t0);
        t0 = clock_type::now();
        const auto fast_r = search_subsets(tab, spec, Objective::maximize);
        const double fast = seconds_since(t0);
        if (slow.node_masks != fast_r.node_masks) {
            std::printf("subset search mismatch between paths\n");
            return 1;
        }
        report("subset search (n=15)", ref, fast);
    }

    {
        // Full-size search through the fast path only (the slow path would
        // need ~2e9 window comparisons).
        const EnsembleTable tab = build_ensemble(dims, 8, 3);
        const SubsetPatternSpec spec{tab.unpack(tab.entries().back().key), 14};
        const auto t0 = clock_type::now();
        const auto r = search_subsets(tab, spec, Objective::maximize);
        std::printf("%-28s %8.3f s   (%llu candidates)\n", "subset search (n=14, fast)",
                    seconds_since(t0), static_cast<unsigned long long>(r.candidates));
    }
    return 0;
}
