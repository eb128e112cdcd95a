"""Standalone ``girth`` entry point wrapping the management command."""
import os
import sys


def run(argv=None):
    """Run ``girth <subcommand> ...`` and return the process exit code."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'planargirth.settings')
    import django
    from django.core.management import call_command
    from django.core.management.base import CommandError

    django.setup()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        call_command('girth', *argv)
    except CommandError as exc:
        sys.stderr.write(f'error: {exc}\n')
        return getattr(exc, 'returncode', 1)
    return 0


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
