# apps/cli/management/commands/quermass.py
from django.core.management.base import BaseCommand, CommandError

from cli.operations import CliOperations, ConfigOperations
from cli.serializers import COMMANDS
from utils.exceptions import ArgumentError, GeometryError, VerificationFailure

OVERRIDE_KEYS = (
    'n', 'L', 'resolution', 'k', 'm', 'j', 'epsilons', 'count', 'seed',
    'coefficients_file', 'ball_center', 'output_dir',
)


class Command(BaseCommand):
    help = (
        "Curvature integrals, deficits and Fraenkel asymmetry of nearly spherical sets, "
        "and numerical checks of their stability inequalities."
    )

    def add_arguments(self, parser):
        parser.add_argument('command', choices=COMMANDS)
        parser.add_argument('--config', help="JSON run configuration; flat options below override it")
        parser.add_argument('--n', type=int, help="Sphere dimension (1 or 2)")
        parser.add_argument('--L', type=int, help="Largest harmonic degree")
        parser.add_argument('--resolution', type=int, help="Quadrature grid resolution")
        parser.add_argument('--k', type=int, help="Curvature order")
        parser.add_argument('--m', type=int, help="Matching order (−1 for volume)")
        parser.add_argument('--j', type=int, help="Constrained quermass order")
        parser.add_argument('--epsilons', type=float, nargs='+', help="Sweep levels")
        parser.add_argument('--count', type=int, help="Samples per level")
        parser.add_argument('--seed', type=int)
        parser.add_argument('--coefficients-file', dest='coefficients_file',
                            help="JSON array of {degree, order, value}")
        parser.add_argument('--ball-center', dest='ball_center', type=float, nargs='+')
        parser.add_argument('--output-dir', dest='output_dir')

    def handle(self, *args, **options):
        overrides = {key: options[key] for key in OVERRIDE_KEYS if options.get(key) is not None}
        try:
            data = ConfigOperations.load_json(options['config']) if options.get('config') else {}
            if not isinstance(data, dict):
                raise ArgumentError(f"{options['config']}: expected a JSON object")
            config = ConfigOperations.validate({**data, **overrides, 'command': options['command']})
            status = CliOperations.run(config, self.stdout)
        except (ArgumentError, GeometryError) as e:
            raise CommandError(str(e), returncode=2)
        except VerificationFailure as e:
            raise CommandError(str(e), returncode=1)
        if status:
            raise CommandError(f"{options['command']} reported failures", returncode=status)
