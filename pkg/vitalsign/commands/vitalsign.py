#!/usr/bin/env python3
"""
Main command-line runner for vitalsign.
"""

import sys
import logging

from ..classifier import Classifier
from ..config import RunConfig
from ..errors import VitalSignError, UsageError, DataValidationError, NumericFailure
from ..models import DEFAULT_ROSTER
from ..workers import WorkerPool

# Import all of our stages and classifiers.
from ..stage import Stage, StageArgumentParser
from ..stages import *
from ..classifiers import *

# Exit status for problems reading or writing files.
IO_ERROR_STATUS = 2

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def list_enumerables(enumerable_type, name):
    """ Prints a list of all available stages or models. """

    print("Available {}:".format(name))
    for enumerable in enumerable_type.all_named_subclasses():
        print("\t{:20} -- {}".format(enumerable.UI_NAME, enumerable.UI_DESCRIPTION))
    print()


def list_models():
    """ Prints the available classifier variants, in the order evaluate runs them by default. """

    print("Available models:")
    for variant in DEFAULT_ROSTER:
        cls = Classifier.get_subclass_from_name(variant)
        kind = 'transparent' if cls.INTERPRETABLE else 'black box'
        print("\t{:20} -- {} [{}]".format(cls.UI_NAME, cls.UI_DESCRIPTION, kind))
    print()


def error(message):
    """ Convenience method to print a message to the stderr. """
    sys.stderr.write("{}\n".format(message))
    sys.stderr.flush()


def fatal(message, return_code=UsageError.EXIT_STATUS):
    """ Prints a message to stderr and exits with the given status. """
    error(message)
    sys.exit(return_code)


def configure_logging(verbosity):
    """ Sends log output to stderr: warnings by default, -v for progress, -vv for everything. """

    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def create_runner_parser():
    """ Creates the parser for the arguments every stage shares. """

    # Help is left to each stage's parser, so --help lists the stage's own flags too.
    parser = StageArgumentParser(prog='vitalsign', add_help=False,
        description="early ICU mortality prediction from heart-rate recordings")

    parser.add_argument('stage', type=Stage.get_subclass_from_name, nargs='?',
        help='the pipeline stage to run; use --list-stages for a list')

    parser.add_argument('--config', default=None,
        help="YAML file of settings; flags given on the command line take precedence")
    parser.add_argument('--print-config', action='store_true',
        help="print the effective settings as a configuration file, then quit")
    parser.add_argument('--jobs', '-j', type=int, default=None,
        help="worker processes for per-record and per-fold work [default: $VITALSIGN_JOBS, else 1]")
    parser.add_argument('--verbose', '-v', action='count', default=0,
        help="log progress; repeat for debug output")

    parser.add_argument('--list-stages', action='store_true',
        help="list the available pipeline stages, then quit")
    parser.add_argument('--list-models', action='store_true',
        help="list the available classifier models, then quit")

    return parser


def run(argv):
    """ Runs vitalsign with the given arguments; returns the exit status. """

    parser = create_runner_parser()
    args, leftover_args = parser.parse_known_args(argv)

    if args.list_stages or args.list_models:
        if args.list_stages:
            list_enumerables(Stage, 'stages')
        if args.list_models:
            list_models()
        return 0

    configure_logging(args.verbose)

    # Without a stage, the only thing we can do is offer help.
    if args.stage is None:
        if '-h' in leftover_args or '--help' in leftover_args:
            parser.print_help()
            return 0
        raise UsageError("invalid stage; use --list-stages for a list of valid stages")

    config = RunConfig.load(args.config) if args.config else None

    settings, leftover_args = args.stage.parse_arguments(argv, [parser], config)
    if leftover_args:
        raise UsageError("unexpected arguments: {}".format(' '.join(leftover_args)))

    if settings.print_config:
        sys.stdout.write(RunConfig.from_namespace(settings).to_text())
        return 0

    try:
        pool = WorkerPool(settings.jobs)
    except ValueError as e:
        raise UsageError(str(e)) from None

    summary = args.stage(settings, pool).run()
    print(summary)
    return 0


def main(argv=None):
    """ Main file runner for vitalsign. """

    argv = sys.argv[1:] if argv is None else list(argv)

    try:
        return_code = run(argv)
    except VitalSignError as e:
        fatal("error: {}".format(e), e.EXIT_STATUS)
    except OSError as e:
        fatal("error: {}".format(e), IO_ERROR_STATUS)
    except ValueError as e:
        fatal("error: {}".format(e), DataValidationError.EXIT_STATUS)
    except ArithmeticError as e:
        fatal("error: {}".format(e), NumericFailure.EXIT_STATUS)

    sys.exit(return_code)


if __name__ == "__main__":
    main()
