"""
Stage that cleans raw records into smoothed, resampled signals.
"""

from ..pipeline import CohortPipeline
from ..stage import Stage, add_output_argument, add_preprocess_arguments, preprocess_config_from, load_stage_manifest


class PreprocessStage(Stage):
    """ Truncates, fills, smooths, resamples and clips every record of a manifest. """

    UI_NAME = 'preprocess'
    UI_DESCRIPTION = 'clean raw records into smoothed signals at a common rate'


    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--manifest', default=None, help="manifest of the raw records to preprocess")
        add_output_argument(parser, 'preprocessed')
        add_preprocess_arguments(parser)


    def run(self):
        manifest = load_stage_manifest(self.settings)

        pipeline = CohortPipeline(preprocess_config_from(self.settings), self.pool)
        manifest_path = pipeline.preprocess_manifest(manifest, self.settings.out)

        return "preprocessed {} records into {}".format(len(manifest), manifest_path)
