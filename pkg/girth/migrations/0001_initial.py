# Generated by Django 6.0.2 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='LookupEntry',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('k', models.PositiveIntegerField()),
                ('w', models.PositiveIntegerField()),
                ('format_version', models.PositiveSmallIntegerField(default=1)),
                ('key', models.TextField()),
                ('payload', models.JSONField()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name_plural': 'Lookup entries',
                'ordering': ['k', 'key'],
                'unique_together': {('k', 'w', 'format_version', 'key')},
            },
        ),
    ]
