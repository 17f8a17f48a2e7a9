# apps/cli/tests.py
import json
import os
import tempfile
from io import StringIO

import jsonschema
import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from utils.exceptions import ArgumentError
from .operations import CSV_HEADER, ConfigOperations, ReportOperations
from .serializers import RunConfigSerializer


def parse_output(text):
    """'name: v1 v2 ...' lines as {name: [floats]}; other lines are skipped."""
    values = {}
    for line in text.splitlines():
        name, _, rest = line.partition(': ')
        try:
            values[name] = [float(token) for token in rest.split()]
        except ValueError:
            continue
    return values


def load_schema():
    with open(settings.BASE_DIR / 'docs' / 'sweep_summary.schema.json') as handle:
        return json.load(handle)


class RunConfigSerializerTest(SimpleTestCase):
    """Run configuration validation"""

    def test_defaults(self):
        serializer = RunConfigSerializer(data={'command': 'info'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        data = serializer.validated_data
        self.assertEqual((data['n'], data['L'], data['k'], data['m']), (2, 6, 0, -1))
        self.assertEqual(data['epsilons'], [0.04, 0.02, 0.01])

    def test_unknown_keys_rejected(self):
        serializer = RunConfigSerializer(data={'command': 'info', 'bogus': 1})
        self.assertFalse(serializer.is_valid())
        self.assertIn('invalid_fields', serializer.errors)

    def test_inconsistent_orders(self):
        for data in (
            {'command': 'info', 'n': 2, 'k': 3},
            {'command': 'sweep', 'n': 2, 'k': 2},
            {'command': 'sweep', 'n': 2, 'k': 1, 'm': 1},
            {'command': 'sweep', 'n': 2, 'k': 1, 'm': 0, 'j': 1},
            {'command': 'verify', 'L': 1},
        ):
            self.assertFalse(RunConfigSerializer(data=data).is_valid(), data)

    def test_j_sets_matching_order(self):
        serializer = RunConfigSerializer(data={'command': 'sweep', 'n': 2, 'k': 1, 'j': 0})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['m'], 0)

    def test_coefficient_checks(self):
        base = {'command': 'info', 'n': 2, 'L': 2}
        bad_degree = {**base, 'coefficients': [{'degree': 3, 'order': 0, 'value': 0.1}]}
        bad_order = {**base, 'coefficients': [{'degree': 2, 'order': 3, 'value': 0.1}]}
        circle_order = {'command': 'info', 'n': 1, 'L': 2, 'coefficients': [{'degree': 2, 'order': 1, 'value': 0.1}]}
        for data in (bad_degree, bad_order, circle_order):
            self.assertFalse(RunConfigSerializer(data=data).is_valid(), data)

    def test_ball_center_checks(self):
        self.assertFalse(RunConfigSerializer(data={'command': 'asymmetry', 'n': 2, 'ball_center': [0.1, 0.0]}).is_valid())
        self.assertFalse(RunConfigSerializer(data={'command': 'asymmetry', 'n': 1, 'ball_center': [1.5, 0.0]}).is_valid())
        self.assertFalse(RunConfigSerializer(data={
            'command': 'asymmetry', 'n': 1, 'ball_center': [0.1, 0.0],
            'coefficients': [{'degree': 2, 'order': 2, 'value': 0.1}],
        }).is_valid())


class ConfigOperationsTest(SimpleTestCase):
    """Config files and diagnostics"""

    def test_malformed_json_names_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'run.json')
            with open(path, 'w') as handle:
                handle.write('{\n  "n": 2,\n  "L": \n}')
            with self.assertRaises(ArgumentError) as caught:
                ConfigOperations.load_json(path)
        self.assertIn('line 4', str(caught.exception))

    def test_field_diagnostics(self):
        with self.assertRaises(ArgumentError) as caught:
            ConfigOperations.validate({'command': 'info', 'count': 0})
        self.assertIn('count:', str(caught.exception))

    def test_coefficients_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'coeffs.json')
            with open(path, 'w') as handle:
                json.dump([{'degree': 2, 'order': 0, 'value': 0.05}], handle)
            config = ConfigOperations.validate({'command': 'info', 'n': 2, 'L': 2, 'coefficients_file': path})
        omega = ConfigOperations.build_set(config)
        self.assertAlmostEqual(omega.u.coeffs[6], 0.05, places=15)
        self.assertEqual(np.count_nonzero(omega.u.coeffs), 1)

    def test_number_format_round_trips(self):
        for value in (0.1, 1 / 3, np.pi * 1e-9):
            self.assertEqual(float(ReportOperations.format_value(value)), value)
        self.assertEqual(ReportOperations.format_value(3), '3')


class CommandTest(SimpleTestCase):
    """The quermass management command"""

    def test_info_on_ball(self):
        out = StringIO()
        call_command('quermass', 'info', n=2, L=2, stdout=out)
        values = parse_output(out.getvalue())
        self.assertAlmostEqual(values['volume'][0], 4 * np.pi / 3, delta=1e-12)
        for k, expected in ((0, 4 * np.pi), (1, 8 * np.pi), (2, 4 * np.pi)):
            self.assertAlmostEqual(values[f'I_{k}'][0], expected, delta=1e-11)
        for name, value in values.items():
            if name.startswith('delta_'):
                self.assertLess(abs(value[0]), 1e-12, name)
        self.assertLess(values['alpha'][0], 1e-8)
        np.testing.assert_allclose(values['barycenter'], 0.0, atol=1e-14)

    def test_info_on_circle(self):
        out = StringIO()
        call_command('quermass', 'info', n=1, L=3, stdout=out)
        values = parse_output(out.getvalue())
        self.assertAlmostEqual(values['I_1'][0], 2 * np.pi, delta=1e-12)

    def test_usage_errors_exit_two(self):
        with self.assertRaises(CommandError) as caught:
            call_command('quermass', 'info', n=2, k=3, stdout=StringIO())
        self.assertEqual(caught.exception.returncode, 2)

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'run.json')
            with open(path, 'w') as handle:
                json.dump({'n': 2, 'bogus': True}, handle)
            with self.assertRaises(CommandError) as caught:
                call_command('quermass', 'info', config=path, stdout=StringIO())
        self.assertEqual(caught.exception.returncode, 2)
        self.assertIn('bogus', str(caught.exception))

    def test_overrides_beat_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'run.json')
            with open(path, 'w') as handle:
                json.dump({'n': 2, 'L': 2}, handle)
            out = StringIO()
            call_command('quermass', 'info', config=path, n=1, stdout=out)
        self.assertNotIn('I_2', parse_output(out.getvalue()))

    def test_asymmetry_of_translated_ball(self):
        out = StringIO()
        call_command('quermass', 'asymmetry', n=2, L=12, ball_center=[0.1, 0.0, 0.0], stdout=out)
        values = parse_output(out.getvalue())
        self.assertLess(values['alpha'][0], 1e-6)
        np.testing.assert_allclose(values['center'], [0.1, 0.0, 0.0], atol=1e-4)
        self.assertAlmostEqual(values['radius'][0], 1.0, delta=1e-9)

    def test_sweep_is_byte_identical(self):
        contents = []
        for _ in range(2):
            with tempfile.TemporaryDirectory() as tmp:
                out = StringIO()
                call_command(
                    'quermass', 'sweep', n=1, L=4, k=0, epsilons=[0.04, 0.02], count=2, seed=1,
                    output_dir=tmp, stdout=out,
                )
                with open(os.path.join(tmp, 'sweep_n1_k0_m-1_seed1.csv'), 'rb') as handle:
                    contents.append(handle.read())
                with open(os.path.join(tmp, 'sweep_n1_k0_m-1_seed1.json')) as handle:
                    summary = json.load(handle)
        self.assertEqual(contents[0], contents[1])
        lines = contents[0].decode().splitlines()
        self.assertEqual(lines[0], ','.join(CSV_HEADER))
        self.assertEqual(len(lines), 1 + 2 * 2)
        self.assertTrue(summary['passed'])
        self.assertEqual(summary['epsilons'], [0.04, 0.02])
        self.assertEqual([level['check'] for level in summary['levels']], ['volume_constrained_stability'] * 2)
        self.assertIsNotNone(summary['sup_norm'])
        jsonschema.validate(instance=summary, schema=load_schema())

    def test_quermass_sweep_summary_matches_schema(self):
        with tempfile.TemporaryDirectory() as tmp:
            call_command(
                'quermass', 'sweep', n=2, L=4, k=1, j=0, epsilons=[0.05], count=1, seed=2,
                output_dir=tmp, stdout=StringIO(),
            )
            with open(os.path.join(tmp, 'sweep_n2_k1_m0_seed2.json')) as handle:
                summary = json.load(handle)
        self.assertEqual(summary['m'], 0)
        self.assertIsNone(summary['sup_norm'])
        self.assertEqual(summary['levels'][0]['check'], 'quermass_constrained_stability')
        jsonschema.validate(instance=summary, schema=load_schema())

    def test_summary_schema_rejects_malformed_output(self):
        config = {'n': 1, 'L': 4, 'k': 0, 'm': -1, 'seed': 0, 'count': 1}
        summary = ReportOperations.summary(config, [])
        summary['epsilons'] = [0.02]
        summary['sup_norm'] = {'epsilons': [0.02]}
        with self.assertLogs('cli.operations', level='ERROR'):
            with self.assertRaises(jsonschema.ValidationError):
                ReportOperations.validate_summary(summary)

    def test_verify_on_coarse_grid_warns(self):
        out = StringIO()
        with self.assertLogs('functionals.operations', level='WARNING') as logs:
            try:
                call_command('quermass', 'verify', n=2, L=4, count=1, resolution=8, stdout=out)
            except CommandError as e:
                self.assertEqual(e.returncode, 1)
        self.assertTrue(any('Resolution warning' in line for line in logs.output))
        self.assertIn('checks passed', out.getvalue())
