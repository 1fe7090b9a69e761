/* set_lock_status: the early return skips mutex_unlock */
struct slot {
	struct controller *ctrl;
	long last_emi_toggle;
};

int set_lock_status(struct slot *slot, int status)
{
	int retval;

	mutex_lock(&slot->ctrl->crit_sect);
	/* has it been >1 sec since our last toggle? */
	if ((get_seconds() - slot->last_emi_toggle) < 1)
		return -EINVAL;

	retval = write_status(slot, status);
	slot->last_emi_toggle = get_seconds();
	mutex_unlock(&slot->ctrl->crit_sect);
	return retval;
}
