"""Simulated fixed-allocation blocking versus the Erlang-B curve.

Under fixed allocation with physical checks off, a single provider's band
is an M/M/K/K loss system, so the simulator must track the Erlang-B
formula across offered loads.  This is the quantitative anchor of the
whole engine: admission, departure ordering and seeding all have to be
right for the agreement to hold.

Run: python demos/03_erlang_b_validation.py
"""
import numpy as np

from dsasim import Strategy, TrafficSpec, erlang_b, run_simulation
from dsasim.topology import (
    GainMatrices,
    NetworkTopology,
    SecondaryLink,
    ServiceProvider,
    SpectrumChannel,
)

CHANNELS = 10
HOLDING = 10.0


def build_topology() -> NetworkTopology:
    provider = ServiceProvider(
        id=0,
        channels=tuple(
            SpectrumChannel(id=k, center_frequency=4e8 + k * 1e6, bandwidth=1e6)
            for k in range(CHANNELS)
        ),
        cost_rate=0.05,
    )
    link = SecondaryLink(
        id=0,
        tx_position=(0.0, 0.0),
        rx_position=(250.0, 0.0),
        bandwidth=1e6,
        rate=1e5,
        rate_min=5e4,
        rate_max=2e5,
        power=0.1,
        power_max=1.0,
        noise=1e-10,
        sinr_target=5.0,
    )
    gains = GainMatrices(g_ss=[[250.0 ** -3.0]], g_ps=np.zeros((0, 1)))
    return NetworkTopology(providers=(provider,), links=(link,), primary_points=(), gains=gains)


def main() -> None:
    topology = build_topology()
    loads = [1.0, 2.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0]
    arrivals_target = 40_000

    print(f"M/M/{CHANNELS}/{CHANNELS} loss system, ~{arrivals_target} arrivals per point\n")
    print(f"{'offered (E)':>12} {'simulated':>12} {'Erlang-B':>12} {'abs diff':>10}")
    rows = []
    for offered in loads:
        rate = offered / HOLDING
        spec = TrafficSpec(
            arrival_rates=(rate,),
            mean_holding_time=HOLDING,
            horizon=arrivals_target / rate,
            seed=4242,
        )
        _, report = run_simulation(topology, spec, Strategy.FIXED)
        oracle = erlang_b(CHANNELS, offered)
        rows.append((offered, report.blocking_probability, oracle))
        print(
            f"{offered:12.1f} {report.blocking_probability:12.6f} {oracle:12.6f} "
            f"{abs(report.blocking_probability - oracle):10.6f}"
        )

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        offered, simulated, oracle = zip(*rows)
        plt.figure(figsize=(7, 4.5))
        plt.plot(offered, oracle, "k-", label="Erlang-B formula")
        plt.plot(offered, simulated, "o", label="simulation")
        plt.xlabel("offered load (Erlangs)")
        plt.ylabel("blocking probability")
        plt.title(f"Fixed allocation vs Erlang-B, K = {CHANNELS}")
        plt.legend()
        plt.grid(alpha=0.3)
        plt.tight_layout()
        plt.savefig("erlang_b_validation.png", dpi=120)
        print("\nwrote erlang_b_validation.png")
    except ImportError:
        print("\n(matplotlib not installed; table only)")


if __name__ == "__main__":
    main()
