"""
Stage that generates a synthetic CCU cohort.
"""

from dataclasses import replace

from ..stage import Stage, add_output_argument, add_seed_argument
from ..synth import default_config, generate_cohort, write_cohort


class SynthStage(Stage):
    """ Writes a calibrated synthetic cohort: one HRW record per patient, plus its manifest. """

    UI_NAME = 'synth'
    UI_DESCRIPTION = 'generate a synthetic heart-rate cohort'


    @classmethod
    def add_arguments(cls, parser):
        defaults = default_config()

        add_output_argument(parser, 'cohort')
        add_seed_argument(parser)
        parser.add_argument('--survived', type=int, default=defaults.n_survived,
            help="number of patients who survive their stay")
        parser.add_argument('--passed-away', type=int, default=defaults.n_passed,
            help="number of patients who pass away during their stay")
        parser.add_argument('--rates', type=float, nargs='+', default=list(defaults.rates_hz),
            help="sampling rates (Hz) each record's rate is drawn from")
        parser.add_argument('--duration', type=float, default=defaults.duration_s,
            help="length of each record, in seconds")


    def run(self):
        settings = self.settings

        cfg = default_config(n_survived=settings.survived, n_passed=settings.passed_away, seed=settings.seed)
        cfg = replace(cfg, rates_hz=tuple(settings.rates), duration_s=settings.duration)

        manifest, records = generate_cohort(cfg, self.pool)
        manifest_path = write_cohort(manifest, records, settings.out)

        return "synthesized {} patients ({} passed away) into {}".format(
            cfg.n_patients, cfg.n_passed, manifest_path)
