# Generated by Django 5.0.14 on 2026-10-18 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SuiteRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=32)),
                ('label', models.CharField(blank=True, help_text='Suite name or input file the command ran on.', max_length=200)),
                ('seed', models.IntegerField(default=0)),
                ('config_digest', models.CharField(help_text='sha256 of the run configuration.', max_length=64)),
                ('passed', models.PositiveIntegerField(default=0)),
                ('failed', models.PositiveIntegerField(default=0)),
                ('inconclusive', models.PositiveIntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-pk'],
            },
        ),
        migrations.CreateModel(
            name='CheckResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('suite', models.CharField(max_length=64)),
                ('name', models.CharField(max_length=200)),
                ('anchor', models.CharField(help_text='Source phrase of the expected value, or "plumbing".', max_length=255)),
                ('provenance', models.CharField(choices=[('published', 'Published'), ('derived', 'Derived'), ('trivial', 'Trivial')], max_length=16)),
                ('verdict', models.CharField(choices=[('pass', 'Pass'), ('fail', 'Fail'), ('inconclusive', 'Inconclusive')], max_length=16)),
                ('observed', models.FloatField(blank=True, null=True)),
                ('expected', models.CharField(blank=True, max_length=255)),
                ('tolerance', models.FloatField(blank=True, null=True)),
                ('payload', models.JSONField(blank=True, default=dict)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='core.suiterun')),
            ],
            options={
                'ordering': ['suite', 'name'],
                'unique_together': {('run', 'suite', 'name')},
            },
        ),
    ]
