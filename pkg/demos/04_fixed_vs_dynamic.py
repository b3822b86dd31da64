"""Fixed allocation versus dynamic sharing under asymmetric load.

Provider 0 is overloaded (12 Erlangs on 10 channels) while provider 1 sits
nearly idle (1 Erlang on 10 channels).  Fixed allocation strands the idle
band; dynamic selection lets overflow sessions borrow it, cutting blocking
by an order of magnitude and lifting overall channel utilization.

Run: python demos/04_fixed_vs_dynamic.py
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
RATES = (1.2, 0.1)  # 12 and 1 Erlangs
SEEDS = range(20)


def build_topology() -> NetworkTopology:
    providers = tuple(
        ServiceProvider(
            id=i,
            channels=tuple(
                SpectrumChannel(id=k, center_frequency=(400 + 50 * i + k) * 1e6, bandwidth=1e6)
                for k in range(CHANNELS)
            ),
            cost_rate=0.05,
        )
        for i in range(2)
    )
    links = tuple(
        SecondaryLink(
            id=i,
            tx_position=(300.0 * i, 0.0),
            rx_position=(300.0 * i + 200.0, 150.0),
            bandwidth=1e6,
            rate=1e5,
            rate_min=5e4,
            rate_max=2e5,
            power=0.1,
            power_max=1.0,
            noise=1e-10,
            sinr_target=5.0,
        )
        for i in range(2)
    )
    g_ss = [[250.0 ** -3.0, 1e-8], [1e-8, 250.0 ** -3.0]]
    return NetworkTopology(
        providers=providers,
        links=links,
        primary_points=(),
        gains=GainMatrices(g_ss=g_ss, g_ps=np.zeros((0, 2))),
    )


def main() -> None:
    topology = build_topology()
    print(f"2 providers x {CHANNELS} channels, offered {RATES[0]*HOLDING:.0f} + "
          f"{RATES[1]*HOLDING:.0f} Erlangs, {len(list(SEEDS))} seeds\n")

    results = {Strategy.FIXED: ([], []), Strategy.DYNAMIC_SBAC: ([], [])}
    for seed in SEEDS:
        spec = TrafficSpec(
            arrival_rates=RATES, mean_holding_time=HOLDING, horizon=3000.0, seed=seed
        )
        for strategy, (blocks, etas) in results.items():
            _, report = run_simulation(topology, spec, strategy)
            blocks.append(report.blocking_probability)
            etas.append(report.spectral_efficiency)

    print(f"{'strategy':>14} {'blocking':>10} {'+/-':>8} {'eta_s':>8} {'+/-':>8}")
    for strategy, (blocks, etas) in results.items():
        print(
            f"{strategy.value:>14} {np.mean(blocks):10.4f} {np.std(blocks):8.4f} "
            f"{np.mean(etas):8.4f} {np.std(etas):8.4f}"
        )

    # loss-system reference points for the two extremes
    split = (RATES[0] * erlang_b(CHANNELS, RATES[0] * HOLDING)
             + RATES[1] * erlang_b(CHANNELS, RATES[1] * HOLDING)) / sum(RATES)
    pooled = erlang_b(2 * CHANNELS, sum(RATES) * HOLDING)
    print("\nAnalytic anchors:")
    print(f"  per-band Erlang-B mix (fixed ideal)  : {split:.4f}")
    print(f"  fully pooled Erlang-B (sharing bound): {pooled:.4f}")
    print("\nDynamic sharing approaches the pooled bound because the selector")
    print("steers overflow onto whichever band currently has free channels.")


if __name__ == "__main__":
    main()
