// Compares the serial reference path loop against the OpenMP one on the same
// strong-error workload and checks that the numeric output is identical.

#include <chrono>
#include <cstdio>
#include <string>

#include "sdesim/mc.hpp"

using namespace sdesim;

namespace {

double run(const SdeModel& model, mc::EnsembleConfig cfg, int threads, std::string* csv) {
    cfg.threads = threads;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = mc::strong_error_study(model, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *csv = mc::error_report_csv(rep, /*include_cpu=*/false);
    return secs;
}

}  // namespace

int main(int argc, char** argv) {
    int P = 2000;
    int threads = 0;
    if (argc > 1) P = std::atoi(argv[1]);
    if (argc > 2) threads = std::atoi(argv[2]);

    const SdeModel model = make_gbm(3.0, 1.4);
    mc::EnsembleConfig cfg;
    cfg.P = P;
    cfg.seed = 42;
    cfg.M = 10;
    cfg.Mstart = 4;
    cfg.y0 = Vec{1.0};

    std::string serial_csv, parallel_csv;
    const double ts = run(model, cfg, 1, &serial_csv);
    const double tp = run(model, cfg, threads, &parallel_csv);

    std::printf("paths: %d\n", P);
    std::printf("serial:   %.3f s\n", ts);
    std::printf("parallel: %.3f s  (speedup %.2fx)\n", tp, ts / tp);
    if (serial_csv != parallel_csv) {
        std::printf("MISMATCH: serial and parallel outputs differ\n");
        return 1;
    }
    std::printf("outputs identical: yes\n");
    return 0;
}
