/* planted: the statement between goto and its label is skipped */
int init(struct dev *d)
{
	int rc;

	rc = probe(d);
	if (rc)
		goto out;
	goto out;
	d->ready = 1;
out:
	return rc;
}
