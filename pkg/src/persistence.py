"""
Certificate store: witness certificates and their verification reports on disk.
"""

from pathlib import Path
from typing import Any, Optional

from .logging_config import get_logger
from .schemas import CertificateSchemaError, certificate_from_dict, report_to_dict, validate_report
from .utils import load_json, write_canonical_json
from .witnesses import VerificationReport, WitnessCertificate

logger = get_logger(__name__)

REPORT_SUFFIX = ".report.json"


def certificate_id(cert: WitnessCertificate) -> str:
    """File stem of a certificate, e.g. "C3-p2-a1" or "B4-p11-principal"."""
    if cert.case_tag == "principal":
        return f"{cert.group}-p{cert.p}-principal"
    return f"{cert.group}-p{cert.p}-a{cert.a}"


class CertificateStore:
    """
    Keeps certificates as ``<id>.json`` and reports as ``<id>.report.json``
    in one directory, all written as canonical JSON.
    """

    def __init__(self, storage_dir: Optional[Path] = None):
        """
        Args:
            storage_dir: Directory for certificate files (None = use default)
        """
        if storage_dir is None:
            storage_dir = Path.home() / ".cache" / "epiwit" / "certificates"

        self.storage_dir = Path(storage_dir)
        self.storage_dir.mkdir(parents=True, exist_ok=True)

    def _certificate_path(self, cert_id: str) -> Path:
        return self.storage_dir / f"{cert_id}.json"

    def _report_path(self, cert_id: str) -> Path:
        return self.storage_dir / f"{cert_id}{REPORT_SUFFIX}"

    def save_certificate(self, cert: WitnessCertificate) -> bool:
        """
        Save a certificate under its id.

        Returns:
            bool: True if successful
        """
        cert_id = certificate_id(cert)
        try:
            file_path = self._certificate_path(cert_id)
            write_canonical_json(cert.to_dict(), file_path)
            logger.info("Certificate saved", cert_id=cert_id, path=str(file_path))
            return True
        except (OSError, ValueError) as e:
            logger.error("Failed to save certificate", cert_id=cert_id, error=e)
            return False

    def load_certificate(self, cert_id: str) -> Optional[WitnessCertificate]:
        """
        Load a certificate.

        Returns:
            WitnessCertificate or None if not found

        Raises:
            CertificateSchemaError: If the file is not a valid certificate
        """
        file_path = self._certificate_path(cert_id)
        if not file_path.exists():
            logger.warning("Certificate not found", cert_id=cert_id)
            return None
        return certificate_from_dict(load_json(file_path))

    def list_certificates(self) -> list[dict[str, Any]]:
        """
        Metadata of every readable certificate, sorted by id.
        """
        certificates = []
        for file_path in sorted(self.storage_dir.glob("*.json")):
            if file_path.name.endswith(REPORT_SUFFIX):
                continue
            try:
                cert = certificate_from_dict(load_json(file_path))
            except (CertificateSchemaError, OSError, ValueError) as e:
                logger.warning("Skipping unreadable certificate", path=str(file_path), error=str(e))
                continue
            cert_id = file_path.stem
            certificates.append(
                {
                    "cert_id": cert_id,
                    "group": cert.group,
                    "p": cert.p,
                    "case_tag": cert.case_tag,
                    "claimed_dim": cert.claimed_dim,
                    "has_report": self._report_path(cert_id).exists(),
                }
            )
        return certificates

    def save_report(self, report: VerificationReport, cert_id: str) -> bool:
        """
        Returns:
            bool: True if successful
        """
        try:
            file_path = self._report_path(cert_id)
            write_canonical_json(report_to_dict(report), file_path)
            logger.info("Report saved", cert_id=cert_id, overall=report.overall)
            return True
        except (OSError, ValueError) as e:
            logger.error("Failed to save report", cert_id=cert_id, error=e)
            return False

    def load_report(self, cert_id: str) -> Optional[dict[str, Any]]:
        """
        Raises:
            CertificateSchemaError: If the file is not a valid report
        """
        file_path = self._report_path(cert_id)
        if not file_path.exists():
            return None
        data = load_json(file_path)
        validate_report(data)
        return data

    def delete_certificate(self, cert_id: str) -> bool:
        """
        Delete a certificate and its report.

        Returns:
            bool: True if the certificate existed
        """
        file_path = self._certificate_path(cert_id)
        if not file_path.exists():
            logger.warning("Certificate not found", cert_id=cert_id)
            return False
        file_path.unlink()
        self._report_path(cert_id).unlink(missing_ok=True)
        logger.info("Certificate deleted", cert_id=cert_id)
        return True

    def import_certificate(self, import_path: Path) -> Optional[str]:
        """
        Validate a certificate file and copy it into the store.

        Returns:
            str or None: Certificate id if successful

        Raises:
            CertificateSchemaError: If the file is not a valid certificate
        """
        if not import_path.exists():
            logger.error("Import file not found", path=str(import_path))
            return None
        cert = certificate_from_dict(load_json(import_path))
        return certificate_id(cert) if self.save_certificate(cert) else None
