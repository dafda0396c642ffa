"""
Run configuration -- flat YAML files of settings that sit between built-in defaults and the command line.

A configuration file is a mapping of flag names to values, e.g.:

    seed: 11
    folds: 5
    models: [decision_tree, random_forest]

Keys may be written with dashes or underscores. An empty file is a valid (empty) configuration.
"""

import logging
from dataclasses import dataclass, field

import yaml

from .errors import UsageError


log = logging.getLogger(__name__)

# Settings that only steer the runner itself, and so never come from (or go to) a configuration file.
RUNNER_ONLY_SETTINGS = frozenset(('stage', 'config', 'print_config', 'list_stages', 'list_models', 'verbose'))


def normalize_key(key):
    """ Returns the argparse destination for a configuration key; 'target-hz' -> 'target_hz'. """
    return str(key).strip().replace('-', '_')


@dataclass
class RunConfig:
    """ A set of named settings, as loaded from a configuration file or gathered from a command line. """

    settings: dict = field(default_factory=dict)


    @classmethod
    def from_text(cls, text, source='<string>'):
        """ Parses the YAML text of a configuration file. """

        try:
            document = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise UsageError("can't parse configuration {}: {}".format(source, e)) from None

        # An empty file loads as None.
        if document is None:
            document = {}

        if not isinstance(document, dict):
            raise UsageError("configuration {} must be a mapping of setting names to values".format(source))

        return cls({normalize_key(key): value for key, value in document.items()})


    @classmethod
    def load(cls, path):
        with open(path) as f:
            config = cls.from_text(f.read(), path)

        log.info("loaded %d setting(s) from %s", len(config.settings), path)
        return config


    @classmethod
    def from_namespace(cls, namespace):
        """ Captures the effective settings of a parsed command line. """

        settings = {key: value for key, value in vars(namespace).items() if key not in RUNNER_ONLY_SETTINGS}
        return cls(settings)


    def check_keys(self, valid_keys):
        """ Raises UsageError if any setting isn't one of the given keys. """

        unknown = sorted(set(self.settings) - set(valid_keys))
        if unknown:
            raise UsageError("unknown setting(s) in configuration: {}; valid settings: {}".format(
                ', '.join(unknown), ', '.join(sorted(valid_keys))))


    def apply_to(self, parser):
        """ Installs these settings as the parser's defaults, so that flags given on the command line still win. """

        valid_keys = [action.dest for action in parser._actions if action.dest not in RUNNER_ONLY_SETTINGS]
        self.check_keys(set(valid_keys) - {'help'})
        parser.set_defaults(**self.settings)


    def to_text(self):
        """ Renders the settings as a configuration file that loads back to the same settings. """

        if not self.settings:
            return "{}\n"
        return yaml.safe_dump(self.settings, default_flow_style=False, sort_keys=True)


    def save(self, path):
        with open(path, 'w') as f:
            f.write(self.to_text())
