"""Kjører alle simuleringsscenariene og skriver én CSV per scenario."""

import json
import logging
import sys
from pathlib import Path

from gsens.analyzers import default_alpha_grid
from gsens.config import Link, OutputFormat
from gsens.core import GSensError
from gsens.models import SmmSpec
from gsens.processors import emit_report
from gsens.simulation import calibrate_linear, calibrate_logistic, run_monte_carlo

# Sett opp logging
Path('logs').mkdir(exist_ok=True)
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler('logs/reproduce_simulation_tables.log'),
        logging.StreamHandler()
    ]
)
logger = logging.getLogger(__name__)

DEFAULTS = {
    'output_dir': 'results',
    'n': 1000,
    'm': 1000,
    'master_seed': 2023,
    'p_z': 0.5,
    'p_x': 0.6,
    'sigma': 1.0,
}

LINEAR_SCENARIOS = [(psi, alpha_star) for psi in (0.0, 1.5) for alpha_star in (0.0, 0.5)]
LOGISTIC_SCENARIOS = [
    (psi, alpha_star, p_y)
    for p_y in (0.3, 0.8)
    for psi in (0.0, 0.5)
    for alpha_star in (0.0, 0.5)
]


def load_config(path=None):
    """Leser valgfri JSON-fil som overstyrer DEFAULTS."""
    config = dict(DEFAULTS)
    if path is None:
        return config
    try:
        with open(path, 'r') as f:
            config.update(json.load(f))
        return config
    except Exception as e:
        logger.error(f"Kunne ikke laste konfigurasjon: {str(e)}")
        raise


def run_scenario(name, dgp, link, config):
    """Kjører ett scenario og skriver rapporten."""
    grid = default_alpha_grid(center=dgp.alpha_star)
    report = run_monte_carlo(
        dgp, SmmSpec(link=link), config['n'], config['m'], grid, config['master_seed']
    )
    path = Path(config['output_dir']) / f"{name}.csv"
    emit_report(report, OutputFormat.CSV, path)

    at_truth = report.index_of(dgp.alpha_star)
    logger.info(
        f"{name}: dekning {report.coverage[at_truth]:.3f}, "
        f"KI-lengde {report.mean_ci_length[at_truth]:.3f} ved alpha = alpha*"
    )


def main():
    """Hovedfunksjon for reproduksjon av simuleringstabellene."""
    try:
        config = load_config(sys.argv[1] if len(sys.argv) > 1 else None)
        Path(config['output_dir']).mkdir(parents=True, exist_ok=True)

        for psi, alpha_star in LINEAR_SCENARIOS:
            dgp = calibrate_linear(psi, alpha_star, config['p_z'], config['p_x'], config['sigma'])
            run_scenario(f"linear_psi{psi:g}_alpha{alpha_star:g}", dgp, Link.IDENTITY, config)

        for psi, alpha_star, p_y in LOGISTIC_SCENARIOS:
            dgp = calibrate_logistic(psi, alpha_star, config['p_z'], config['p_x'], p_y)
            run_scenario(f"logistic_psi{psi:g}_alpha{alpha_star:g}_py{p_y:g}", dgp, Link.LOGIT, config)

    except GSensError as e:
        logger.error(f"En feil oppstod i hovedfunksjonen: {str(e)}")
        sys.exit(3)


if __name__ == '__main__':
    main()
