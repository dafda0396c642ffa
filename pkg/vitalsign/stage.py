"""
Pipeline stages -- the units of work the vitalsign runner exposes as subcommands.
"""

import argparse
import json
import logging
import os
import sys

import tableprint

from .cohort import FLOAT_FORMAT, read_feature_csv
from .enumerable import VitalSignEnumerable
from .errors import UsageError
from .imbalance import OversampleConfig
from .manifest import filter_care_unit, load_manifest
from .pipeline import CohortPipeline
from .preprocess import PreprocessConfig


log = logging.getLogger(__name__)

BALANCE_CHOICES = ('none', 'asuwo')


class StageArgumentParser(argparse.ArgumentParser):
    """ Argument parser that reports usage problems as UsageErrors rather than exiting on its own. """

    def error(self, message):
        raise UsageError("{}: {}".format(self.prog, message))


class Stage(VitalSignEnumerable):
    """ Base class for vitalsign subcommands.

    Subclasses set UI_NAME and UI_DESCRIPTION, declare their flags in add_arguments(), and do their
    work in run(), which returns the one-line summary the runner prints.
    """

    @classmethod
    def add_arguments(cls, parser):
        """ Adds this stage's flags to its argument parser. """
        pass


    @classmethod
    def create_parser(cls, parent_parser=[]):
        parser = StageArgumentParser(parents=parent_parser, prog="vitalsign {}".format(cls.UI_NAME),
            description=cls.UI_DESCRIPTION, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        cls.add_arguments(parser)
        return parser


    @classmethod
    def parse_arguments(cls, args, parent_parser=[], config=None):
        """ Parses this stage's settings from the command line, on top of any configuration file.

        Returns: parsed_args, leftover_args
        """

        parser = cls.create_parser(parent_parser)

        if config is not None:
            config.apply_to(parser)

        return parser.parse_known_args(args)


    def __init__(self, settings, pool):
        """
        Args:
            settings -- The argparse namespace produced by parse_arguments().
            pool -- The WorkerPool to spread independent work over.
        """
        self.settings = settings
        self.pool = pool


    def run(self):
        """ Performs this stage; returns a one-line summary of what was done. """
        raise NotImplementedError("stage must implement run()")


    def output_path(self, name):
        """ Returns the path of an output file, creating the output directory if needed. """

        os.makedirs(self.settings.out, exist_ok=True)
        return os.path.join(self.settings.out, name)


#
# Flags shared between stages.
#

def add_output_argument(parser, default):
    parser.add_argument('--out', default=default, help="directory to write outputs to")


def add_seed_argument(parser):
    parser.add_argument('--seed', type=int, default=7, help="seed for every random choice this stage makes")


def add_preprocess_arguments(parser):
    group = parser.add_argument_group('preprocessing')
    group.add_argument('--window', type=int, default=PreprocessConfig.window,
        help="moving-average width, in samples at the target rate")
    group.add_argument('--target-hz', type=float, default=PreprocessConfig.target_hz,
        help="rate every signal is resampled to")
    group.add_argument('--first-hour-only', action=argparse.BooleanOptionalAction, default=PreprocessConfig.first_hour_only,
        help="keep only the first hour of each signal")
    group.add_argument('--clip-before-smoothing', action='store_true',
        help="clip to the first hour before smoothing, rather than last")
    group.add_argument('--care-unit', default=None,
        help="only use patients who stayed in this care unit (e.g. CCU)")


def preprocess_config_from(settings):
    return PreprocessConfig(
        window=settings.window,
        target_hz=settings.target_hz,
        first_hour_only=settings.first_hour_only,
        clip_before_smoothing=settings.clip_before_smoothing,
    )


def load_stage_manifest(settings):
    """ Loads the manifest named by --manifest, narrowed to --care-unit if one was given. """

    if not settings.manifest:
        raise UsageError("no manifest given; pass --manifest")

    manifest = load_manifest(settings.manifest)
    if settings.care_unit:
        manifest = filter_care_unit(manifest, settings.care_unit)
        log.info("kept %d patients from care unit %s", len(manifest), settings.care_unit)
    return manifest


def add_balance_arguments(parser, default='asuwo'):
    defaults = OversampleConfig()

    group = parser.add_argument_group('class balancing')
    group.add_argument('--balance', choices=BALANCE_CHOICES, default=default,
        help="how to rebalance training rows: not at all, or by adaptive semi-unsupervised weighted oversampling")
    group.add_argument('--target-ratio', type=float, default=defaults.target_ratio,
        help="minority:majority ratio to oversample up to")
    group.add_argument('--k-majority', type=int, default=defaults.k_majority,
        help="majority neighbours used to weight each minority cluster")
    group.add_argument('--k-intra', type=int, default=defaults.k_intra,
        help="same-cluster neighbours a synthetic row may interpolate toward")
    group.add_argument('--linkage-quantile', type=float, default=defaults.linkage_threshold_quantile,
        help="quantile of minority pairwise distances at which clustering stops merging")


def balance_config_from(settings):
    """ Returns the OversampleConfig asked for on the command line, or None for --balance none. """

    if settings.balance == 'none':
        return None

    config = OversampleConfig(
        target_ratio=settings.target_ratio,
        k_majority=settings.k_majority,
        k_intra=settings.k_intra,
        linkage_threshold_quantile=settings.linkage_quantile,
        seed=settings.seed,
    )
    config.validate()
    return config


def add_param_argument(parser, help):
    parser.add_argument('--param', action='append', default=[], metavar='NAME=VALUE', help=help)


def load_feature_cohort(path):
    if not path:
        raise UsageError("no feature file given; pass --data")
    return read_feature_csv(path)


def build_stage_cohort(settings, pool):
    """ Returns the cohort named by --data (a feature CSV) or --manifest (raw records, run through the full chain). """

    if settings.data and settings.manifest:
        raise UsageError("give either --data or --manifest, not both")

    if settings.data:
        return read_feature_csv(settings.data)
    if settings.manifest:
        pipeline = CohortPipeline(preprocess_config_from(settings), pool)
        return pipeline.build_cohort(load_stage_manifest(settings))

    raise UsageError("no input given; pass --data or --manifest")


#
# Output helpers.
#

def write_frame(frame, path, index=False):
    frame.to_csv(path, index=index, float_format=FLOAT_FORMAT)


def write_json(document, path):
    with open(path, 'w') as f:
        json.dump(document, f, indent=1, sort_keys=True)
        f.write("\n")


def print_table(frame, out=None):
    """ Prints a DataFrame as a console table; to stdout unless another stream is given. """

    headers = [str(column) for column in frame.columns]
    rows = frame.values.tolist()

    width = max([len(header) for header in headers] + [len(str(value)) for row in rows for value in row
        if isinstance(value, str)] + [11]) + 2
    tableprint.table(rows, headers, width=width, out=out or sys.stdout)
