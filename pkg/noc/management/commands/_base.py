import json
import logging
import sys

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from noc.exceptions import NocError
from noc.serializers.topology import TopologyConfigSerializer

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
CHECK_FAILED = 1


class NocCommand(BaseCommand):
    """
    Shared plumbing for the noc commands: JSON inputs go through a
    serializer, bad input exits with status 2 and failed checks with 1.
    """

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except ValidationError as exc:
            raise CommandError(self.format_errors(exc.detail), returncode=USAGE_ERROR)
        except NocError as exc:
            logger.error('%s: %s', type(exc).__name__, exc)
            raise CommandError(str(exc), returncode=USAGE_ERROR)

    def run(self, **options):
        raise NotImplementedError('subclasses of NocCommand must provide a run() method')

    def fail(self, message):
        raise CommandError(message, returncode=CHECK_FAILED)

    def usage(self, message):
        raise CommandError(message, returncode=USAGE_ERROR)

    @staticmethod
    def format_errors(detail):
        if isinstance(detail, dict):
            return '; '.join('%s: %s' % (key, NocCommand.format_errors(value)) for key, value in detail.items())
        if isinstance(detail, list):
            return ', '.join(NocCommand.format_errors(item) for item in detail if item)
        return str(detail)

    def load_json(self, path):
        try:
            if path == '-':
                return json.load(sys.stdin)
            with open(path) as stream:
                return json.load(stream)
        except OSError as exc:
            raise CommandError('cannot read %s: %s' % (path, exc.strerror), returncode=USAGE_ERROR)
        except json.JSONDecodeError as exc:
            raise CommandError('%s is not valid JSON: %s' % (path, exc), returncode=USAGE_ERROR)

    def deserialize(self, serializer_class, data, **context):
        serializer = serializer_class(data=data, context=context)
        if not serializer.is_valid():
            logger.error(serializer.errors)
            raise CommandError(self.format_errors(serializer.errors), returncode=USAGE_ERROR)
        return serializer.save()

    def load_topology(self, path):
        return self.deserialize(TopologyConfigSerializer, self.load_json(path))

    def write_output(self, path, text):
        if path is None or path == '-':
            self.stdout.write(text, ending='' if text.endswith('\n') else '\n')
            return
        with open(path, 'w') as stream:
            stream.write(text)
        logger.info('wrote %s', path)

    def write_json(self, path, data):
        self.write_output(path, json.dumps(data, indent=2) + '\n')
