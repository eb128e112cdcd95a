from django.db import models
from django.core.exceptions import ValidationError


class LookupEntry(models.Model):
    """One cached small-graph answer, stored under its canonical key."""

    k = models.PositiveIntegerField()
    w = models.PositiveIntegerField()
    format_version = models.PositiveSmallIntegerField(default=1)
    key = models.TextField()
    payload = models.JSONField()
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['k', 'key']
        unique_together = ('k', 'w', 'format_version', 'key')
        verbose_name_plural = 'Lookup entries'

    def __str__(self):
        return f'k={self.k} w={self.w} {self.key}'

    def clean(self):
        missing = {'girth', 'dist', 'first', 'avoid'} - set(self.payload or {})
        if missing:
            raise ValidationError(f'Payload lacks {", ".join(sorted(missing))}.')
        if not self.key.startswith(f'{self.k}|'):
            raise ValidationError(f'Key {self.key!r} does not describe a {self.k}-node graph.')
