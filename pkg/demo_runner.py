import logging

from colorama import Fore, Style

from effective import adiabatic_eliminate, first_peak_height, light_shift, two_photon_effective
from errors import LadderSimError
from scheme import (MHZ, UM, US, AtomCloud, focus, get_preset, preset_three_photon, preset_two_photon,
                    um, with_imbalance)
from spatial import averaged_a1_analytic, averaged_a1_effective, averaged_a1_numeric, crosstalk, detuning_grid, spectrum

logger = logging.getLogger(__name__)


def demo_wide_beams():
    print("=== Wide-beam pi pulse ===\n")
    three = preset_three_photon()
    eff = adiabatic_eliminate(three)
    print(f"Three-photon Omega/2pi = {eff.reduced_rabi / MHZ:.4f} MHz, Gamma(0) = {eff.decay_total:.4e} 1/s")
    print(f"Analytic first peak: {first_peak_height(eff):.4f}")
    cloud = AtomCloud(um(1.0))
    print(f"Numeric first peak, three-photon: {averaged_a1_numeric(three, cloud):.4f}")
    two = preset_two_photon()
    reduced = two_photon_effective(*(t.peak_rabi for t in two.transitions), two.transitions[0].detuning)
    print(f"Two-photon Omega/2pi = {reduced.reduced_rabi / MHZ:.4f} MHz, "
          f"light shift {reduced.light_shift / MHZ:.3f} MHz")
    print(f"Numeric first peak, two-photon: {averaged_a1_numeric(two, cloud):.4f}\n")


def demo_coverage(xi_values=(1.0, 2.0, 10.0)):
    print("=== First-peak amplitude vs coverage w/a (a = 1 um) ===\n")
    cloud = AtomCloud(um(1.0))
    print(f"{'w/a':>6} {'three-photon':>14} {'analytic':>10} {'two-photon':>12} {'two, reduced':>14}")
    rows = []
    for xi in xi_values:
        three = focus(preset_three_photon(), xi * cloud.radius)
        two = focus(preset_two_photon(), xi * cloud.radius)
        a1_three = averaged_a1_numeric(three, cloud)
        try:
            analytic = f"{averaged_a1_analytic(three, cloud):.4f}"
        except LadderSimError:
            analytic = '-'
        a1_two = averaged_a1_numeric(two, cloud)
        a1_two_reduced = averaged_a1_effective(two, cloud)
        rows.append((xi, a1_three, a1_two, a1_two_reduced))
        print(f"{xi:>6.1f} {a1_three:>14.4f} {analytic:>10} {a1_two:>12.4f} {a1_two_reduced:>14.4f}")
    print()
    return rows


def demo_light_shift():
    print("=== Light shifts ===\n")
    grid = detuning_grid(-30 * MHZ, 30 * MHZ, 0.2 * MHZ)
    for ratio in (1.0, 2.0, 4.0):
        result = spectrum(with_imbalance(preset_three_photon(), ratio), 2, grid, 0.125 * US)
        print(f"Three-photon Omega1:Omega3 = {ratio:g}:1 -> peak at {result.peak_center / MHZ:+.3f} MHz")
    bare = get_preset('two_photon_rb87_bare')
    result = spectrum(bare, 1, grid, 0.125 * US)
    print(f"Two-photon 160:50 MHz -> peak at {result.peak_center / MHZ:+.3f} MHz "
          f"(predicted {light_shift(bare) / MHZ:+.3f} MHz)\n")


def demo_crosstalk():
    print("=== Neighbour crosstalk (w = 2 um, a = 1 um) ===\n")
    scheme = focus(preset_three_photon(), um(2.0))
    for d in (5.0, 8.0):
        result = crosstalk(scheme, AtomCloud(um(1.0), um(d)))
        print(f"d = {d:.0f} um: max Rydberg population {result.value:.2e} at t = {result.peak_time / US:.3f} us")
    print()


def interactive_demo():
    print(f"{Fore.CYAN}=== Interactive coverage explorer ==={Style.RESET_ALL}")
    print("Enter w/a to compare both schemes at a = 1 um, 'quit' to exit\n")
    cloud = AtomCloud(um(1.0))
    while True:
        try:
            answer = input("w/a: ").strip()
            if answer.lower() in ['quit', 'exit', 'q']:
                break
            if not answer:
                continue
            w = float(answer) * cloud.radius
            three = averaged_a1_numeric(focus(preset_three_photon(), w), cloud)
            two = averaged_a1_numeric(focus(preset_two_photon(), w), cloud)
            print(f"{Fore.GREEN}three-photon A1 = {three:.4f}, two-photon A1 = {two:.4f} "
                  f"(w = {w / UM:.2f} um){Style.RESET_ALL}\n")
        except KeyboardInterrupt:
            print("\nExiting...")
            break
        except (ValueError, LadderSimError) as e:
            print(f"{Fore.RED}Error: {e}{Style.RESET_ALL}\n")


def main():
    print("Rydberg Ladder Excitation Demo\n")
    demos = {
        '1': ('Wide-beam pi pulse', demo_wide_beams),
        '2': ('A1 vs coverage', demo_coverage),
        '3': ('Light shifts', demo_light_shift),
        '4': ('Neighbour crosstalk', demo_crosstalk),
        '5': ('Run All Demos', lambda: [demo_wide_beams(), demo_coverage(), demo_light_shift(), demo_crosstalk()]),
    }
    print("Choose a demo:")
    for key, (name, _) in demos.items():
        print(f"  {key}. {name}")
    choice = input("\nEnter choice (or press Enter for interactive): ").strip()
    if choice in demos:
        demos[choice][1]()
    else:
        interactive_demo()


if __name__ == "__main__":
    main()
