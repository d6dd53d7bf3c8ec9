from django.apps import AppConfig


class PhotonicsConfig(AppConfig):
    name = "photonics"
    verbose_name = "Entangled Fock State Photonics"
