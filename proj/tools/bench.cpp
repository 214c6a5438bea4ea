// Benchmark comparing the OpenMP kernels against their serial reference
// implementations on a synthesized workload, verifying identical output.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "dtnkit/epidemic.hpp"
#include "dtnkit/mobility.hpp"

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

}  // namespace

int main() {
  dtn::RdConfig config;
  config.arena = {200.0, 200.0};
  config.n_nodes = 32;
  config.duration = 40000.0;
  config.speed_min = 1.0;
  config.speed_max = 3.0;
  config.pause_min = 0.0;
  config.pause_max = 20.0;
  config.seed = 20240229;

  auto t0 = std::chrono::steady_clock::now();
  const dtn::MovementTrace movement = dtn::synthesize_rd(config);
  std::printf("synthesize_rd             %8.1f ms  (%zu nodes, %.0f s)\n", ms_since(t0),
              movement.tracks.size(), movement.duration);

  t0 = std::chrono::steady_clock::now();
  const dtn::ContactTrace contacts = dtn::movement_to_contacts(movement, 15.0, 1);
  const double contacts_par = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const dtn::ContactTrace contacts_ref = dtn::movement_to_contacts_serial(movement, 15.0, 1);
  const double contacts_ser = ms_since(t0);

  std::printf("movement_to_contacts      %8.1f ms  (%zu encounters)\n", contacts_par,
              contacts.records.size());
  std::printf("  serial reference        %8.1f ms  (speedup %.2fx)\n", contacts_ser,
              contacts_ser / contacts_par);
  if (!(contacts == contacts_ref)) {
    std::printf("MISMATCH: parallel and serial contact traces differ\n");
    return 1;
  }

  const dtn::Workload workload = dtn::broadcast_workload(contacts);
  t0 = std::chrono::steady_clock::now();
  const dtn::RoutingReport report = dtn::run_epidemic(contacts, workload);
  const double route_par = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const dtn::RoutingReport report_ref = dtn::run_epidemic_serial(contacts, workload);
  const double route_ser = ms_since(t0);

  std::printf("run_epidemic              %8.1f ms  (%zu deliveries)\n", route_par,
              report.deliveries.size());
  std::printf("  serial reference        %8.1f ms  (speedup %.2fx)\n", route_ser,
              route_ser / route_par);

  bool same = report.deliveries.size() == report_ref.deliveries.size() &&
              report.total_transmissions == report_ref.total_transmissions;
  if (same) {
    for (std::size_t i = 0; i < report.deliveries.size(); ++i) {
      const dtn::DeliveryRecord &a = report.deliveries[i], &b = report_ref.deliveries[i];
      if (a.msg != b.msg || a.dest != b.dest || a.t_deliver != b.t_deliver ||
          a.hops != b.hops) {
        same = false;
        break;
      }
    }
  }
  if (!same) {
    std::printf("MISMATCH: parallel and serial routing reports differ\n");
    return 1;
  }
  std::printf("parallel and serial kernels agree\n");
  return 0;
}
