"""
Nonlocal symmetries of Schrodinger equations

Usage:
  schrosym verify-commutators [--config=CONFIG] [--out=OUT] [--seed=SEED] [--grid=GRID] [--dim=DIM] [--process-limit=PROCESS_LIMIT] [-v | -vv | -vvv]
  schrosym kernel-residuals [--config=CONFIG] [--out=OUT] [--seed=SEED] [--grid=GRID] [--dim=DIM] [--process-limit=PROCESS_LIMIT] [-v | -vv | -vvv]
  schrosym hurley-check [--config=CONFIG] [--out=OUT] [--seed=SEED] [--grid=GRID] [--dim=DIM] [--process-limit=PROCESS_LIMIT] [-v | -vv | -vvv]
  schrosym transform-check [--config=CONFIG] [--out=OUT] [--seed=SEED] [--grid=GRID] [--dim=DIM] [--process-limit=PROCESS_LIMIT] [-v | -vv | -vvv]
  schrosym simulate [--config=CONFIG] [--out=OUT] [--seed=SEED] [--grid=GRID] [--dim=DIM] [--process-limit=PROCESS_LIMIT] [-v | -vv | -vvv]
  schrosym asymptotic-compare [--config=CONFIG] [--out=OUT] [--seed=SEED] [--grid=GRID] [--dim=DIM] [--process-limit=PROCESS_LIMIT] [-v | -vv | -vvv]
  schrosym specfun-selftest [--config=CONFIG] [--out=OUT] [--seed=SEED] [--grid=GRID] [--dim=DIM] [--process-limit=PROCESS_LIMIT] [-v | -vv | -vvv]

Options:
  -h --help     Show this screen.
  --version     Show version.

Commands:
  verify-commutators    Checks the commutation relations of the symmetry operators on random free solutions
  kernel-residuals      Checks that the closed-form kernels solve their equations and are invariant
  hurley-check          Checks the spin 1/2 and spin 1 Hurley systems and their modified generators
  transform-check       Checks the potential transforms, the nonlinear gauge maps and the AS linearization
  simulate              Runs the split-step solver for one nonlinearity and stores snapshots
  asymptotic-compare    Compares simulations with the reduced phase solutions in the asymptotic region
  specfun-selftest      Checks the special function identities

"""
import logging
import os
import sys
from docopt import docopt, DocoptExit
from schrosym import error
from schrosym.config import CommandLineArguments, load_config
from schrosym.constants import VERSION
from schrosym.controller import asymptotics, commutators, hurley, kernels, selftest, simulate, transforms
from schrosym.error import ConfigError, ParameterError, SchrosymError
from schrosym.report import discard_partial


def main(**kwargs):
    try:
        docopt_args = docopt(__doc__, version=VERSION)
    except DocoptExit as e:
        print(e.code)
        sys.exit(2)
    arguments = CommandLineArguments(docopt_args, os.getcwd())

    log = logging.getLogger()
    handler = logging.StreamHandler()
    formatter = logging.Formatter("%(asctime)s   %(message)s", "%Y-%m-%d %H:%M:%S")
    handler.setFormatter(formatter)
    log.addHandler(handler)
    log.setLevel(arguments.log_level)
    log.debug(docopt_args)
    # Every subcommand has a controller with a main(clargs, config) function that returns a Report.
    commands = {'verify-commutators': commutators,
                'kernel-residuals': kernels,
                'hurley-check': hurley,
                'transform-check': transforms,
                'simulate': simulate,
                'asymptotic-compare': asymptotics,
                'specfun-selftest': selftest}

    config = None
    try:
        config = load_config(arguments)
        report = commands[arguments.command].main(arguments, config)
    except (ConfigError, ParameterError) as e:
        error.fail(str(e), 2)
    except SchrosymError as e:
        # solver and numerical failures end the run without a report
        if config is not None:
            discard_partial(config.output_directory)
        error.fail("%s: %s" % (e.__class__.__name__, e), 1)
    if not report.passed:
        error.fail("%d binding check(s) failed: %s" % (len(report.failures),
                                                       ", ".join(check.name for check in report.failures)), 1)


if __name__ == '__main__':
    main()
